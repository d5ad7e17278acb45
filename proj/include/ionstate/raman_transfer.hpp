#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ionstate/detection.hpp"

namespace ionstate {

struct TransferConfig {
  double lambda1 = 493e-9;  // m
  double lambda2 = 650e-9;  // m
  double theta = 0.7853981633974483;  // beam projection on the trap axis, rad
  double trap_omega = 0.0;            // rad/s, axial
  double mass = 0.0;                  // kg
  double rabi = 0.0;                  // carrier Rabi scale, rad/s
  double nbar = 0.0;
  double gamma = 0.0;  // cooling linewidth, rad/s
  double radial_omega_x = 0.0;  // rad/s, carried but not used by the model
  double radial_omega_y = 0.0;
  /// Overrides the geometric Lamb-Dicke parameter when set.
  std::optional<double> eta_override;

  void validate() const;
};

/// 493/650 nm, 45 degrees, 2pi x 90 kHz axial, 137Ba+, 2pi x 2.60 MHz, nbar 14.
TransferConfig default_transfer_config();

double lamb_dicke(const TransferConfig& cfg);
/// eta_override if present, otherwise lamb_dicke.
double effective_eta(const TransferConfig& cfg);

double laguerre(int n, double x);
double rabi_nn(double rabi, double eta, int n);

/// Thermal occupation nbar^n / (1 + nbar)^(n+1).
double thermal_weight(double nbar, int n);
/// Last n kept in thermal sums: tail weight (nbar/(1+nbar))^(N+1) < 1e-10.
int thermal_cutoff(double nbar);

double thermal_rabi(const TransferConfig& cfg, double t);

struct RabiMinimum {
  double t = 0.0;
  double p_bright = 1.0;
};
/// First local minimum of thermal_rabi, bracketed on a grid and refined.
RabiMinimum first_minimum(const TransferConfig& cfg);

struct RabiCurve {
  std::vector<double> t;  // s
  std::vector<double> p_bright;
  std::vector<double> sigma;  // optional, same length as t when present

  void validate() const;
};

RabiCurve sample_rabi_curve(const TransferConfig& cfg, const std::vector<double>& times);
/// Binomial noise with `shots` per point; sigma filled from the truth.
RabiCurve noisy_rabi_curve(const TransferConfig& cfg, const std::vector<double>& times, int shots,
                           std::uint64_t seed);

struct RabiFitOptions {
  bool float_eta = false;
  int max_iterations = 200;
  /// Used when the curve carries no per-point sigma.
  double default_sigma = 0.01;
};

struct RabiFit {
  double nbar = 0.0;
  double nbar_sigma = 0.0;
  double rabi = 0.0;  // rad/s
  double rabi_sigma = 0.0;
  double eta = 0.0;
  double eta_sigma = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Weighted least squares of thermal_rabi against the curve. eta is taken from
/// cfg unless options.float_eta. Throws DomainError on fewer than 10 points or
/// less than 1.5 oscillation periods of data.
RabiFit fit_rabi(const RabiCurve& curve, const TransferConfig& cfg, const RabiFitOptions& options = {});

double doppler_limit(const TransferConfig& cfg);

struct TransferEstimate {
  double p_transfer = 0.0;
  double sigma = 0.0;
  double t_pi = 0.0;
  double p_bright = 0.0;  // model value at t_pi
  double raw_dark_fraction = 0.0;
};

/// Simulated detection at the first Rabi minimum: per shot a Bernoulli state,
/// a telegraph count and a likelihood classification. The dark fraction is
/// corrected for the classifier's error rates.
TransferEstimate transfer_fidelity(const TransferConfig& cfg, int shots, std::uint64_t seed,
                                   const HistogramModel& stats);
/// Same, at an explicit pulse time.
TransferEstimate transfer_fidelity_at(const TransferConfig& cfg, double t, int shots, std::uint64_t seed,
                                      const HistogramModel& stats);

nlohmann::json to_json(const TransferConfig& cfg);
TransferConfig transfer_config_from_json(const nlohmann::json& doc, const TransferConfig& defaults);

}  // namespace ionstate
