#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace ionstate {

/// Half-integer quantum number stored as twice its value.
///
/// Constructing from a double rejects anything that is not a multiple of 1/2,
/// which is how the angular-momentum routines report domain errors.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static HalfInt from_double(double value);

  constexpr HalfInt(int value) : twice_(2 * value) {}  // NOLINT: integers convert implicitly

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  // Only valid when is_integer().
  constexpr int as_int() const { return twice_ / 2; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    twice_ += o.twice_;
    return *this;
  }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const;

 private:
  int twice_ = 0;
};

/// abs for half-integers.
constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

/// Triangle condition |a-b| <= c <= a+b with a+b+c integer.
bool triangle(HalfInt a, HalfInt b, HalfInt c);

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3) by the Racah sum.
/// Returns exactly 0 when a selection rule fails; throws DomainError when an
/// m exceeds its j or a j is negative.
double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.
double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

/// Convenience overloads taking doubles; non-half-integers raise DomainError.
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6);

}  // namespace ionstate
