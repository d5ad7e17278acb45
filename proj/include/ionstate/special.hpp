#pragma once

namespace ionstate {

/// Regularized lower incomplete gamma P(k, x) = (1/(k-1)!) int_0^x t^(k-1) e^-t dt
/// for integer k >= 1. Series below x = k + 1, Lentz continued fraction above.
double reg_lower_gamma(int k, double x);

/// Complement Q(k, x) = 1 - P(k, x).
double reg_upper_gamma(int k, double x);

/// P(k, hi) - P(k, lo), avoiding cancellation when both are close to 1.
double reg_gamma_interval(int k, double lo, double hi);

/// Poisson probability mass e^-mean mean^n / n!, evaluated in log space.
double poisson_pmf(double mean, int n);

}  // namespace ionstate
