#include "ionstate/special.hpp"

#include <cmath>
#include <limits>

#include "ionstate/errors.hpp"

namespace ionstate {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// x^a e^-x / Gamma(a) in log space.
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

// Upper regularized Q(a,x) by the modified Lentz continued fraction.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

}  // namespace

double reg_lower_gamma(int k, double x) {
  if (k < 1) throw DomainError("reg_lower_gamma: k must be >= 1");
  if (std::isnan(x) || x < 0.0) throw DomainError("reg_lower_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double a = k;
  double p = (x < a + 1.0) ? lower_series(a, x) : 1.0 - upper_fraction(a, x);
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

double reg_upper_gamma(int k, double x) {
  if (k < 1) throw DomainError("reg_upper_gamma: k must be >= 1");
  if (std::isnan(x) || x < 0.0) throw DomainError("reg_upper_gamma: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double a = k;
  double q = (x < a + 1.0) ? 1.0 - lower_series(a, x) : upper_fraction(a, x);
  if (q < 0.0) q = 0.0;
  if (q > 1.0) q = 1.0;
  return q;
}

double reg_gamma_interval(int k, double lo, double hi) {
  if (hi < lo) return -reg_gamma_interval(k, hi, lo);
  // Differences of Q stay accurate once both arguments sit in the upper tail.
  if (lo >= k + 1.0) return reg_upper_gamma(k, lo) - reg_upper_gamma(k, hi);
  return reg_lower_gamma(k, hi) - reg_lower_gamma(k, lo);
}

double poisson_pmf(double mean, int n) {
  if (n < 0) return 0.0;
  if (mean < 0.0) throw DomainError("poisson_pmf: negative mean");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

}  // namespace ionstate
