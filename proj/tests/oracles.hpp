#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: angular symbols are evaluated in exact rational arithmetic,
// the incomplete gamma function by quadrature, Laguerre polynomials by their
// explicit sum, and threshold errors by direct Poisson tail sums.

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gmpxx.h>

namespace oracle {

inline mpz_class fact(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

// Arguments are twice the quantum numbers; every combination fed to fact()
// is a whole number once the selection rules hold.
inline mpq_class delta(int a, int b, int c) {
  return mpq_class(fact((a + b - c) / 2) * fact((a - b + c) / 2) * fact((-a + b + c) / 2), fact((a + b + c) / 2 + 1));
}

inline bool triad(int a, int b, int c) {
  return a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c >= std::abs(a - b) && c <= a + b;
}

inline double signed_sqrt(const mpq_class& prefactor, const mpq_class& sum) {
  if (sum == 0) return 0.0;
  mpq_class sq = prefactor * sum * sum;
  const double mag = std::sqrt(sq.get_d());
  return sgn(sum) < 0 ? -mag : mag;
}

inline double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0 || !triad(j1, j2, j3)) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if ((j1 + m1) % 2 || (j2 + m2) % 2 || (j3 + m3) % 2) return 0.0;
  mpq_class pre = delta(j1, j2, j3);
  pre *= fact((j1 + m1) / 2) * fact((j1 - m1) / 2) * fact((j2 + m2) / 2) * fact((j2 - m2) / 2) *
         fact((j3 + m3) / 2) * fact((j3 - m3) / 2);
  mpq_class sum = 0;
  for (int k = 0; k <= 200; k += 2) {
    const int d[6] = {k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2};
    bool ok = true;
    for (int v : d) ok = ok && v >= 0;
    if (!ok) continue;
    mpz_class den = 1;
    for (int v : d) den *= fact(v / 2);
    mpq_class term(1, den);
    if ((k / 2) % 2) term = -term;
    sum += term;
  }
  sum.canonicalize();
  double v = signed_sqrt(pre, sum);
  const int phase = (j1 - j2 - m3) / 2;
  if (((phase % 2) + 2) % 2) v = -v;
  return v;
}

inline double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triad(j1, j2, j3) || !triad(j1, j5, j6) || !triad(j4, j2, j6) || !triad(j4, j5, j3)) return 0.0;
  const mpq_class pre = delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3);
  const int a[4] = {j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3};
  const int b[3] = {j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4};
  int lo = 0, hi = 1 << 30;
  for (int v : a) lo = std::max(lo, v);
  for (int v : b) hi = std::min(hi, v);
  mpq_class sum = 0;
  for (int t = lo; t <= hi; t += 2) {
    mpz_class den = 1;
    for (int v : a) den *= fact((t - v) / 2);
    for (int v : b) den *= fact((v - t) / 2);
    mpq_class term(fact(t / 2 + 1), den);
    if ((t / 2) % 2) term = -term;
    sum += term;
  }
  sum.canonicalize();
  return signed_sqrt(pre, sum);
}

// P(k, x) = (1/(k-1)!) int_0^x t^(k-1) e^-t dt by adaptive Gauss-Kronrod.
inline double reg_lower_gamma(int k, double x) {
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(static_cast<double>(k));
  auto f = [&](double t) { return t <= 0.0 ? (k == 1 ? std::exp(-lg) : 0.0) : std::exp((k - 1) * std::log(t) - t - lg); };
  // Split at the mode so the peak is resolved.
  const double mode = std::min(x, std::max(k - 1.0, 0.0));
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  if (mode > 0.0) total += GK::integrate(f, 0.0, mode, 8, 1e-14);
  // Beyond the mode the integrand decays; pieces of a few widths keep each panel smooth.
  const double width = std::max(1.0, std::sqrt(static_cast<double>(k)));
  for (double a = mode; a < x; a += 4.0 * width) total += GK::integrate(f, a, std::min(x, a + 4.0 * width), 8, 1e-14);
  return total;
}

// L_n(x) = sum_k C(n, k) (-x)^k / k!
inline double laguerre(int n, double x) {
  long double sum = 0.0L, binom = 1.0L, pow_over_fact = 1.0L;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      binom = binom * (n - k + 1) / k;
      pow_over_fact = pow_over_fact * (-x) / k;
    }
    sum += binom * pow_over_fact;
  }
  return static_cast<double>(sum);
}

inline double poisson(double mean, int n) {
  double p = std::exp(-mean);
  for (int i = 1; i <= n; ++i) p *= mean / i;
  return p;
}

struct ScanResult {
  int n_c;
  double eb, ed;
};

// Exhaustive threshold scan over explicitly summed Poisson tails.
inline ScanResult poisson_threshold_scan(double nd, double nb, int n_max) {
  ScanResult best{1, 2.0, 2.0};
  for (int nc = 1; nc <= n_max; ++nc) {
    double eb = 0.0, below_d = 0.0;
    for (int n = 0; n < nc; ++n) {
      eb += poisson(nb, n);
      below_d += poisson(nd, n);
    }
    const double ed = 1.0 - below_d;
    if (eb + ed < best.eb + best.ed - 1e-15) best = {nc, eb, ed};
  }
  return best;
}

}  // namespace oracle
