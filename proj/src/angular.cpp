#include "ionstate/angular.hpp"

#include <array>
#include <cmath>

#include "ionstate/errors.hpp"

namespace ionstate {

namespace {

constexpr int kMaxFactorial = 300;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> t{};
    t[0] = 1.0L;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

long double fact(int n) {
  if (n < 0 || n > kMaxFactorial) throw DomainError("factorial argument out of range");
  return factorials()[n];
}

// Arguments are twice-values; every sum below is even by construction.
long double fact2(int twice_n) { return fact(twice_n / 2); }

// Triangle coefficient Delta(abc) from twice-values.
long double delta(int a, int b, int c) {
  return fact2(a + b - c) * fact2(a - b + c) * fact2(-a + b + c) / fact2(a + b + c + 2);
}

bool triangle_twice(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) return false;
  if ((a + b + c) % 2 != 0) return false;
  return c >= std::abs(a - b) && c <= a + b;
}

int sign(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace

HalfInt HalfInt::from_double(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
    throw DomainError("not a half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(rounded));
}

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

bool triangle(HalfInt a, HalfInt b, HalfInt c) {
  return triangle_twice(a.twice(), b.twice(), c.twice());
}

double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  const int J1 = j1.twice(), J2 = j2.twice(), J3 = j3.twice();
  const int M1 = m1.twice(), M2 = m2.twice(), M3 = m3.twice();
  if (J1 < 0 || J2 < 0 || J3 < 0) throw DomainError("wigner3j: negative j");
  if (std::abs(M1) > J1 || std::abs(M2) > J2 || std::abs(M3) > J3) {
    throw DomainError("wigner3j: |m| exceeds j");
  }
  if ((J1 + M1) % 2 || (J2 + M2) % 2 || (J3 + M3) % 2) {
    throw DomainError("wigner3j: j and m differ by a half-integer");
  }
  if (M1 + M2 + M3 != 0) return 0.0;
  if (!triangle_twice(J1, J2, J3)) return 0.0;
  // (j1 j2 j3; 0 0 0) vanishes for odd j1+j2+j3.
  if (M1 == 0 && M2 == 0 && M3 == 0 && ((J1 + J2 + J3) / 2) % 2 != 0) return 0.0;

  const long double pre = std::sqrt(delta(J1, J2, J3) * fact2(J1 + M1) * fact2(J1 - M1) *
                                    fact2(J2 + M2) * fact2(J2 - M2) * fact2(J3 + M3) *
                                    fact2(J3 - M3));

  // k runs over integers making every factorial argument nonnegative.
  const int kmin = std::max({0, (J2 - J3 - M1) / 2, (J1 - J3 + M2) / 2});
  const int kmax = std::min({(J1 + J2 - J3) / 2, (J1 - M1) / 2, (J2 + M2) / 2});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = fact(k) * fact2(J3 - J2 + 2 * k + M1) * fact2(J3 - J1 + 2 * k - M2) *
                            fact2(J1 + J2 - J3 - 2 * k) * fact2(J1 - 2 * k - M1) *
                            fact2(J2 - 2 * k + M2);
    sum += sign(k) / den;
  }
  return static_cast<double>(sign((J1 - J2 - M3) / 2) * pre * sum);
}

double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  const int d = j4.twice(), e = j5.twice(), f = j6.twice();
  if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0 || f < 0) throw DomainError("wigner6j: negative j");
  if (!triangle_twice(a, b, c) || !triangle_twice(a, e, f) || !triangle_twice(d, b, f) ||
      !triangle_twice(d, e, c)) {
    return 0.0;
  }
  const long double pre =
      std::sqrt(delta(a, b, c) * delta(a, e, f) * delta(d, b, f) * delta(d, e, c));

  const int tmin = std::max({a + b + c, a + e + f, d + b + f, d + e + c}) / 2;
  const int tmax = std::min({a + b + d + e, a + c + d + f, b + c + e + f}) / 2;
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; ++t) {
    const int T = 2 * t;
    const long double den = fact2(T - a - b - c) * fact2(T - a - e - f) * fact2(T - d - b - f) *
                            fact2(T - d - e - c) * fact2(a + b + d + e - T) *
                            fact2(a + c + d + f - T) * fact2(b + c + e + f - T);
    sum += sign(t) * fact(t + 1) / den;
  }
  return static_cast<double>(pre * sum);
}

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  return wigner3j(HalfInt::from_double(j1), HalfInt::from_double(j2), HalfInt::from_double(j3),
                  HalfInt::from_double(m1), HalfInt::from_double(m2), HalfInt::from_double(m3));
}

double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6) {
  return wigner6j(HalfInt::from_double(j1), HalfInt::from_double(j2), HalfInt::from_double(j3),
                  HalfInt::from_double(j4), HalfInt::from_double(j5), HalfInt::from_double(j6));
}

}  // namespace ionstate
