#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ionstate/errors.hpp"
#include "ionstate/pumping.hpp"

namespace ionstate {

namespace {

constexpr double kRelTol = 1e-9;
constexpr double kAbsTol = 1e-13;

Eigen::VectorXd clamp_and_normalize(Eigen::VectorXd p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < -1e-12) throw NumericalFailure("population went negative during evolution");
    if (p(i) < 0.0) p(i) = 0.0;
  }
  const double total = p.sum();
  if (!(total > 0.0)) throw NumericalFailure("population vanished during evolution");
  return p / total;
}

// Backward Euler with Richardson extrapolation; the extrapolated step is
// L-stable and second order. Step size follows the half/full step difference.
Eigen::VectorXd implicit_evolve(const Eigen::MatrixXd& A, Eigen::VectorXd p, double t) {
  const auto n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
  double h = std::min(t, 1e-3 / scale);
  double now = 0.0;
  int steps = 0;
  while (now < t) {
    if (++steps > 10'000'000) throw NumericalFailure("implicit integrator exceeded step budget");
    h = std::min(h, t - now);
    Eigen::PartialPivLU<Eigen::MatrixXd> full(I - h * A);
    Eigen::PartialPivLU<Eigen::MatrixXd> half(I - 0.5 * h * A);
    const Eigen::VectorXd y1 = full.solve(p);
    const Eigen::VectorXd y2 = half.solve(half.solve(p));
    const double err = (y2 - y1).cwiseAbs().maxCoeff();
    const double tol = kRelTol * p.cwiseAbs().maxCoeff() + kAbsTol;
    if (err <= tol || h <= 1e-300) {
      p = 2.0 * y2 - y1;
      now += h;
    }
    const double factor = err > 0.0 ? 0.9 * std::sqrt(tol / err) : 4.0;
    h *= std::clamp(factor, 0.2, 4.0);
  }
  return p;
}

}  // namespace

bool is_stiff(const RateMatrix& R) {
  double lo = kInfinity, hi = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double out = R.outflow(i);
    if (out > 0.0) {
      lo = std::min(lo, out);
      hi = std::max(hi, out);
    }
  }
  return hi > 0.0 && hi / lo > 1e6;
}

Eigen::VectorXd evolve_populations(const RateMatrix& R, const Eigen::VectorXd& p0, double t, EvolveMethod method) {
  if (t < 0.0 || !std::isfinite(t)) throw DomainError("evolve_populations: t must be finite and >= 0");
  if (p0.size() != static_cast<Eigen::Index>(R.size())) throw ValidationError("population vector size mismatch");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-9) {
    throw DomainError("evolve_populations: p0 must be a probability vector");
  }
  if (t == 0.0 || R.rates.isZero(0.0)) return p0;
  if (method == EvolveMethod::Auto) method = is_stiff(R) ? EvolveMethod::Implicit : EvolveMethod::MatrixExponential;
  if (method == EvolveMethod::Implicit) return clamp_and_normalize(implicit_evolve(R.rates, p0, t));
  const Eigen::MatrixXd propagator = (R.rates * t).exp();
  return clamp_and_normalize(propagator * p0);
}

std::vector<Sublevel> find_dark_states(const RateMatrix& R, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("find_dark_states: threshold must be > 0");
  std::vector<Sublevel> out;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R.outflow(i) < threshold) out.push_back(R.states[i]);
  }
  return out;
}

double depump_timescale(const RateMatrix& R, const Sublevel& s, const std::optional<std::vector<Sublevel>>& target) {
  const std::size_t start = R.require_index(s);
  if (!target) {
    const double out = R.outflow(start);
    return out > 0.0 ? 1.0 / out : kInfinity;
  }

  std::vector<bool> in_target(R.size(), false);
  for (const auto& t : *target) in_target[R.require_index(t)] = true;
  if (in_target[start]) return 0.0;

  // States reachable from s without entering the target.
  std::vector<bool> seen(R.size(), false);
  std::vector<std::size_t> reach;
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  bool reaches_target = false;
  while (!queue.empty()) {
    const auto j = queue.front();
    queue.pop_front();
    reach.push_back(j);
    for (std::size_t i = 0; i < R.size(); ++i) {
      if (i == j || R.rates(i, j) <= 0.0) continue;
      if (in_target[i]) {
        reaches_target = true;
      } else if (!seen[i]) {
        seen[i] = true;
        queue.push_back(i);
      }
    }
  }
  if (!reaches_target) return kInfinity;
  std::sort(reach.begin(), reach.end());

  const auto m = static_cast<Eigen::Index>(reach.size());
  Eigen::MatrixXd Q(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) Q(a, b) = R.rates(reach[a], reach[b]);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Q);
  const auto values = solver.eigenvalues();
  Eigen::Index slow = 0;
  for (Eigen::Index k = 1; k < m; ++k) {
    if (values(k).real() > values(slow).real()) slow = k;
  }
  const double lambda = values(slow).real();
  if (!(lambda < 0.0)) return kInfinity;
  Eigen::VectorXd qsd = solver.eigenvectors().col(slow).real().cwiseAbs();
  qsd /= qsd.sum();

  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R.size()));
  for (Eigen::Index a = 0; a < m; ++a) p0(reach[a]) = qsd(a);
  p0 /= p0.sum();

  // Target states absorb, so 1 - P_target is the survival of the first passage.
  RateMatrix absorbing = R;
  for (std::size_t j = 0; j < R.size(); ++j) {
    if (in_target[j]) absorbing.rates.col(static_cast<Eigen::Index>(j)).setZero();
  }

  // Fit log(1 - P_target) over [0, 5 tau] with tau from the slow eigenvalue;
  // refit once if the fitted constant moved the window appreciably.
  double tau = -1.0 / lambda;
  for (int pass = 0; pass < 2; ++pass) {
    constexpr int kSamples = 40;
    const double dt = 5.0 * tau / kSamples;
    Eigen::VectorXd p = p0;
    double sxx = 0, sxy = 0;
    int used = 0;
    for (int k = 1; k <= kSamples; ++k) {
      p = evolve_populations(absorbing, p, dt);
      double survive = 0.0;
      for (std::size_t i = 0; i < R.size(); ++i) {
        if (!in_target[i]) survive += p(static_cast<Eigen::Index>(i));
      }
      if (survive <= 1e-300) break;
      const double x = k * dt, y = std::log(survive);
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
    // Line through the origin: survival starts at 1.
    if (used == 0 || sxy >= 0.0) return kInfinity;
    const double fitted = -sxx / sxy;
    const bool stable = std::abs(fitted - tau) < 0.05 * tau;
    tau = fitted;
    if (stable) break;
  }
  return tau;
}

}  // namespace ionstate
