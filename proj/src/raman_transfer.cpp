#include "ionstate/raman_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "ionstate/atom.hpp"
#include "ionstate/errors.hpp"
#include "ionstate/optimize.hpp"
#include "ionstate/rng.hpp"

namespace ionstate {

using namespace constants;
using nlohmann::json;

void TransferConfig::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw DomainError("transfer config: wavelengths must be > 0");
  if (!(trap_omega > 0.0)) throw DomainError("transfer config: trap frequency must be > 0");
  if (!(mass > 0.0)) throw DomainError("transfer config: mass must be > 0");
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("transfer config: nbar must be >= 0");
  if (!(theta >= 0.0) || theta > kPi / 2 + 1e-15) throw DomainError("transfer config: theta must lie in [0, pi/2]");
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw DomainError("transfer config: Rabi rate must be >= 0");
  if (!(gamma >= 0.0)) throw DomainError("transfer config: linewidth must be >= 0");
  if (eta_override && !(*eta_override >= 0.0)) throw DomainError("transfer config: eta must be >= 0");
}

TransferConfig default_transfer_config() {
  TransferConfig c;
  c.trap_omega = kTwoPi * 90e3;
  c.mass = 136.9058 * kAtomicMassUnit - kElectronMass;
  c.rabi = kTwoPi * 2.60e6;
  c.nbar = 14.0;
  c.gamma = kTwoPi * 20.1e6;
  c.radial_omega_x = kTwoPi * 388e3;
  c.radial_omega_y = kTwoPi * 348e3;
  return c;
}

double lamb_dicke(const TransferConfig& cfg) {
  cfg.validate();
  const double dk = std::abs(kTwoPi / cfg.lambda1 - kTwoPi / cfg.lambda2);
  return dk * std::cos(cfg.theta) * std::sqrt(kHbar / (2.0 * cfg.mass * cfg.trap_omega));
}

double effective_eta(const TransferConfig& cfg) { return cfg.eta_override ? *cfg.eta_override : lamb_dicke(cfg); }

double laguerre(int n, double x) {
  if (n < 0) throw DomainError("laguerre: n must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double rabi_nn(double rabi, double eta, int n) {
  if (eta < 0.0 || n < 0) throw DomainError("rabi_nn: eta and n must be >= 0");
  const double x = eta * eta;
  return rabi * std::exp(-0.5 * x) * laguerre(n, x);
}

double thermal_weight(double nbar, int n) {
  if (nbar < 0.0 || n < 0) throw DomainError("thermal_weight: nbar and n must be >= 0");
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(nbar) - (n + 1.0) * std::log1p(nbar));
}

int thermal_cutoff(double nbar) {
  if (nbar < 0.0) throw DomainError("thermal_cutoff: nbar must be >= 0");
  if (nbar == 0.0) return 0;
  const double log_ratio = std::log(nbar) - std::log1p(nbar);
  return std::max(0, static_cast<int>(std::ceil(std::log(1e-10) / log_ratio)) - 1);
}

namespace {

double thermal_rabi_raw(double rabi, double eta, double nbar, double t) {
  const int cutoff = thermal_cutoff(nbar);
  const double x = eta * eta;
  const double damp = std::exp(-0.5 * x);
  // Laguerre recurrence and thermal weights advanced together.
  double l_prev = 0.0, l_cur = 1.0;
  double w = 1.0 / (1.0 + nbar);
  const double ratio = nbar / (1.0 + nbar);
  double sum = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    if (n == 1) {
      l_prev = 1.0;
      l_cur = 1.0 - x;
    } else if (n > 1) {
      const double next = ((2.0 * (n - 1) + 1.0 - x) * l_cur - (n - 1) * l_prev) / n;
      l_prev = l_cur;
      l_cur = next;
    }
    const double c = std::cos(0.5 * rabi * damp * l_cur * t);
    sum += w * c * c;
    w *= ratio;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double thermal_rabi(const TransferConfig& cfg, double t) {
  cfg.validate();
  if (t < 0.0) throw DomainError("thermal_rabi: t must be >= 0");
  return thermal_rabi_raw(cfg.rabi, effective_eta(cfg), cfg.nbar, t);
}

RabiMinimum first_minimum(const TransferConfig& cfg) {
  cfg.validate();
  if (!(cfg.rabi > 0.0)) throw DomainError("first_minimum: Rabi rate must be > 0");
  const double period = kTwoPi / cfg.rabi;
  const double dt = period / 400.0;
  const auto p = [&](double t) { return thermal_rabi(cfg, t); };
  double a = p(0.0), b = p(dt);
  RabiMinimum best{0.0, a};
  for (int i = 2; i <= 1600; ++i) {
    const double c = p(i * dt);
    if (b < a && b <= c) {
      const double t = optimize::golden_section(p, (i - 2) * dt, i * dt, 1e-15);
      return {t, p(t)};
    }
    if (c < best.p_bright) best = {i * dt, c};
    a = b;
    b = c;
  }
  return best;
}

void RabiCurve::validate() const {
  if (t.size() != p_bright.size()) throw DomainError("Rabi curve: time and probability lengths differ");
  if (!sigma.empty() && sigma.size() != t.size()) throw DomainError("Rabi curve: sigma length differs");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0)) throw DomainError("Rabi curve: times must be >= 0");
    if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("Rabi curve: times must increase strictly");
    if (!(p_bright[i] >= 0.0 && p_bright[i] <= 1.0)) throw DomainError("Rabi curve: probabilities must lie in [0, 1]");
    if (!sigma.empty() && !(sigma[i] > 0.0)) throw DomainError("Rabi curve: sigma must be > 0");
  }
}

RabiCurve sample_rabi_curve(const TransferConfig& cfg, const std::vector<double>& times) {
  RabiCurve c;
  c.t = times;
  for (double t : times) c.p_bright.push_back(thermal_rabi(cfg, t));
  c.validate();
  return c;
}

RabiCurve noisy_rabi_curve(const TransferConfig& cfg, const std::vector<double>& times, int shots,
                           std::uint64_t seed) {
  if (shots < 1) throw DomainError("noisy_rabi_curve: shots must be >= 1");
  RabiCurve c;
  c.t = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    const double p = thermal_rabi(cfg, times[i]);
    const int k = std::binomial_distribution<int>(shots, p)(rng);
    const double q = static_cast<double>(k) / shots;
    c.p_bright.push_back(q);
    c.sigma.push_back(std::sqrt(std::max(q * (1.0 - q), 1.0 / shots) / shots));
  }
  c.validate();
  return c;
}

RabiFit fit_rabi(const RabiCurve& curve, const TransferConfig& cfg, const RabiFitOptions& options) {
  curve.validate();
  cfg.validate();
  const std::size_t n_pts = curve.t.size();
  if (n_pts < 10) throw DomainError("fit_rabi: need at least 10 points");

  // Rough rate from the first dip below one half.
  std::size_t i_min = 0;
  for (std::size_t i = 1; i + 1 < n_pts; ++i) {
    if (curve.p_bright[i] < 0.5 && curve.p_bright[i] <= curve.p_bright[i - 1] &&
        curve.p_bright[i] <= curve.p_bright[i + 1]) {
      i_min = i;
      break;
    }
  }
  if (i_min == 0) throw DomainError("fit_rabi: no Rabi minimum in the data");
  const double t_half = curve.t[i_min];
  const double span = curve.t.back() - curve.t.front();
  if (span < 1.5 * 2.0 * t_half) throw DomainError("fit_rabi: data span less than 1.5 oscillation periods");

  const bool weighted = !curve.sigma.empty();
  const auto sigma = [&](std::size_t i) { return weighted ? curve.sigma[i] : options.default_sigma; };
  const int n_par = options.float_eta ? 3 : 2;
  const double eta0 = effective_eta(cfg);
  const auto model = [&](const Eigen::VectorXd& q, double t) {
    return thermal_rabi_raw(q[1], n_par == 3 ? q[2] : eta0, std::max(q[0], 0.0), t);
  };
  const auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) r[i] = (curve.p_bright[i] - model(q, curve.t[i])) / sigma(i);
    return r;
  };

  // Coarse grid for the start, then Levenberg-Marquardt.
  Eigen::VectorXd q(n_par);
  double best_chi2 = std::numeric_limits<double>::infinity();
  const double rabi0 = kPi / t_half;
  for (double nb : {0.0, 1.0, 3.0, 7.0, 15.0, 30.0, 60.0}) {
    for (int k = -10; k <= 10; ++k) {
      Eigen::VectorXd trial(n_par);
      trial[0] = nb;
      trial[1] = rabi0 * (1.0 + 0.02 * k);
      if (n_par == 3) trial[2] = eta0;
      const double c2 = residuals(trial).squaredNorm();
      if (c2 < best_chi2) {
        best_chi2 = c2;
        q = trial;
      }
    }
  }

  const auto jacobian = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(n_pts, n_par);
    for (int p = 0; p < n_par; ++p) {
      const double h = p == 0 ? 1e-4 * std::max(1.0, x[0]) : p == 1 ? 1e-7 * x[1] : 1e-6;
      Eigen::VectorXd up = x, dn = x;
      up[p] += h;
      dn[p] = std::max(dn[p] - h, 0.0);
      j.col(p) = (residuals(up) - residuals(dn)) / (up[p] - dn[p]);
    }
    return j;
  };

  RabiFit fit;
  double lambda = 1e-3;
  double chi2 = residuals(q).squaredNorm();
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    const Eigen::VectorXd r = residuals(q);
    const Eigen::MatrixXd j = jacobian(q);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    bool improved = false;
    Eigen::VectorXd step;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      step = -a.ldlt().solve(g);
      Eigen::VectorXd cand = q + step;
      cand[0] = std::max(cand[0], 0.0);
      if (n_par == 3) cand[2] = std::max(cand[2], 0.0);
      const double c2 = residuals(cand).squaredNorm();
      if (c2 <= chi2) {
        const double drop = chi2 - c2;
        step = cand - q;
        q = cand;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        const bool small_step = (step.cwiseAbs().array() <= 1e-10 * (q.cwiseAbs().array() + 1e-8)).all();
        chi2 = c2;
        if (drop <= 1e-14 * std::max(c2, 1e-30) || small_step) fit.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No downhill step at any damping: already at the minimum to working precision.
      fit.converged = true;
    }
    if (fit.converged) break;
  }

  fit.nbar = std::max(q[0], 0.0);
  fit.rabi = q[1];
  fit.eta = n_par == 3 ? q[2] : eta0;
  fit.chi2 = chi2;
  fit.dof = static_cast<int>(n_pts) - n_par;
  const Eigen::MatrixXd j = jacobian(q);
  Eigen::MatrixXd cov = (j.transpose() * j).ldlt().solve(Eigen::MatrixXd::Identity(n_par, n_par));
  if (!weighted && fit.dof > 0) cov *= chi2 / fit.dof;
  fit.nbar_sigma = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.rabi_sigma = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.eta_sigma = n_par == 3 ? std::sqrt(std::max(cov(2, 2), 0.0)) : 0.0;
  if (!fit.converged) fit.diagnostic = "Levenberg-Marquardt hit the iteration cap";
  return fit;
}

double doppler_limit(const TransferConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !(cfg.trap_omega > 0.0)) throw DomainError("doppler_limit: gamma and trap frequency must be > 0");
  return cfg.gamma / (2.0 * cfg.trap_omega);
}

TransferEstimate transfer_fidelity_at(const TransferConfig& cfg, double t, int shots, std::uint64_t seed,
                                      const HistogramModel& stats) {
  if (shots < 1) throw DomainError("transfer_fidelity: shots must be >= 1");
  stats.validate();
  TransferEstimate est;
  est.t_pi = t;
  est.p_bright = thermal_rabi(cfg, t);

  // Error rates of the likelihood classifier itself.
  const int n_max = stats.n_max();
  double eps_b = 0.0, eps_d = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (classify(n, stats).label == StateLabel::Dark) {
      eps_b += bright_pmf(stats, n);
    } else {
      eps_d += dark_pmf(stats, n);
    }
  }

  std::int64_t dark = 0;
  for (int i = 0; i < shots; ++i) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const bool bright = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < est.p_bright;
    const int n = telegraph_sample(stats, bright ? StateLabel::Bright : StateLabel::Dark, rng());
    if (classify(n, stats).label == StateLabel::Dark) ++dark;
  }
  const double frac = static_cast<double>(dark) / shots;
  const double contrast = std::max(1.0 - eps_b - eps_d, 1e-12);
  est.raw_dark_fraction = frac;
  est.p_transfer = std::clamp((frac - eps_b) / contrast, 0.0, 1.0);
  est.sigma = std::sqrt(std::max(frac * (1.0 - frac), 1.0 / shots) / shots) / contrast;
  return est;
}

TransferEstimate transfer_fidelity(const TransferConfig& cfg, int shots, std::uint64_t seed,
                                   const HistogramModel& stats) {
  return transfer_fidelity_at(cfg, first_minimum(cfg).t, shots, seed, stats);
}

json to_json(const TransferConfig& c) {
  json doc = {{"lambda1_m", c.lambda1},
              {"lambda2_m", c.lambda2},
              {"theta_deg", c.theta * 180.0 / kPi},
              {"trap_hz", c.trap_omega / kTwoPi},
              {"mass_kg", c.mass},
              {"rabi_hz", c.rabi / kTwoPi},
              {"nbar", c.nbar},
              {"gamma_hz", c.gamma / kTwoPi},
              {"radial_hz", {c.radial_omega_x / kTwoPi, c.radial_omega_y / kTwoPi}}};
  if (c.eta_override) doc["eta"] = *c.eta_override;
  return doc;
}

TransferConfig transfer_config_from_json(const json& doc, const TransferConfig& defaults) {
  try {
    TransferConfig c = defaults;
    c.lambda1 = doc.value("lambda1_m", c.lambda1);
    c.lambda2 = doc.value("lambda2_m", c.lambda2);
    if (doc.contains("theta_deg")) c.theta = doc.at("theta_deg").get<double>() * kPi / 180.0;
    if (doc.contains("trap_hz")) c.trap_omega = kTwoPi * doc.at("trap_hz").get<double>();
    c.mass = doc.value("mass_kg", c.mass);
    if (doc.contains("rabi_hz")) c.rabi = kTwoPi * doc.at("rabi_hz").get<double>();
    c.nbar = doc.value("nbar", c.nbar);
    if (doc.contains("gamma_hz")) c.gamma = kTwoPi * doc.at("gamma_hz").get<double>();
    if (doc.contains("radial_hz")) {
      c.radial_omega_x = kTwoPi * doc.at("radial_hz").at(0).get<double>();
      c.radial_omega_y = kTwoPi * doc.at("radial_hz").at(1).get<double>();
    }
    if (doc.contains("eta")) {
      if (doc.at("eta").is_null()) c.eta_override.reset();
      else c.eta_override = doc.at("eta").get<double>();
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("transfer config JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("transfer config JSON: ") + e.what());
  }
}

}  // namespace ionstate
