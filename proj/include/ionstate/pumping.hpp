#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionstate/atom.hpp"
#include "ionstate/histogram.hpp"

namespace ionstate {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One extra frequency component of a beam. Offset is angular (rad/s) relative
/// to the carrier; amplitude is relative to the carrier field.
struct Sideband {
  double offset = 0.0;
  double amplitude = 1.0;
};

/// Complex field weights on q = -1, 0, +1 (index q + 1).
using Polarization = std::array<std::complex<double>, 3>;

namespace polarization {
Polarization pi();
Polarization sigma_plus();
Polarization sigma_minus();
/// Linear polarization perpendicular to the field: equal sigma+ and sigma-.
Polarization perpendicular();
}  // namespace polarization

/// A laser beam driving lower -> upper hyperfine manifolds.
///
/// The carrier sits at the target transition frequency plus `detuning`.
/// `rabi` multiplies the normalized dipole amplitude of every coupled pair.
/// `extinction_db` moves 10^(-dB/10) of the power into the polarization
/// components whose nominal weight is zero; unset means perfect polarization.
struct BeamConfig {
  std::string name;
  LevelLabel lower = LevelLabel::D32;
  HalfInt lower_F = 0;
  LevelLabel upper = LevelLabel::P12;
  HalfInt upper_F = 1;
  Polarization pol = polarization::pi();
  double detuning = 0.0;
  double rabi = 0.0;
  std::vector<Sideband> sidebands;
  std::optional<double> extinction_db;
  bool enabled = true;

  void validate() const;
  /// Power fractions on q = -1, 0, +1 after extinction leakage.
  std::array<double, 3> power_weights() const;
  /// Field amplitudes on q = -1, 0, +1 after extinction leakage.
  Polarization field_weights() const;
  /// Absolute carrier frequency in rad/s.
  double carrier_frequency(const AtomModel& atom) const;
};

/// Two-photon Raman pair inside D3/2: a pi beam and a sigma+ beam, both far
/// detuned from P1/2. `single_photon_detuning` is measured from the D3/2 -> P1/2
/// fine-structure line; `two_photon_detuning` from the D3/2 Zeeman interval
/// (F''=3 reference), so zero puts every |F'',m-1> -> |F'',m> pair on resonance.
struct RamanPairConfig {
  std::string name = "R";
  BeamConfig pi_beam;
  BeamConfig sigma_beam;
  double single_photon_detuning = 0.0;
  double two_photon_detuning = 0.0;

  void validate(const AtomModel& atom) const;
  /// The two beams with frequencies resolved from the pair detunings.
  std::array<BeamConfig, 2> effective_beams(const AtomModel& atom) const;
};

struct DetectionSetup {
  AtomModel atom = build_ba137();
  std::vector<BeamConfig> beams;
  std::vector<RamanPairConfig> raman_pairs;
  double collection_efficiency = 1.0;
  double background_rate = 0.0;  // counts/s
  double window = 1e-3;          // s
  /// Couplings detuned further than this (rad/s) are dropped.
  double detuning_cutoff = kInfinity;
  /// Frequency modulation added to D1/D2 for dark-state preparation (rad/s).
  double prep_modulation = 0.0;
  double prep_modulation_amplitude = 1.0;

  void validate() const;
};

/// Population transfer rates between the metastable sublevels (S1/2 and D3/2).
/// rates(to, from) in 1/s; each column sums to zero.
struct RateMatrix {
  std::vector<Sublevel> states;
  Eigen::MatrixXd rates;
  /// Detected-photon rate in each state, collection efficiency included.
  Eigen::VectorXd emission;

  static RateMatrix zero(std::vector<Sublevel> states);
  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> index_of(const Sublevel& s) const;
  std::size_t require_index(const Sublevel& s) const;
  double outflow(std::size_t i) const { return -rates(i, i); }
  RateMatrix& operator+=(const RateMatrix& other);
};

/// Metastable sublevels that form the rate-equation state space.
std::vector<Sublevel> ground_states(const AtomModel& atom);

/// Optical pumping by the enabled beams plus the off-resonant scattering of
/// every Raman beam, with excited states adiabatically eliminated.
RateMatrix scattering_rate_matrix(const DetectionSetup& setup);

/// Effective two-photon Rabi rate |F'',m-1> -> |F'',m> through `via` (P1/2 or P3/2).
double raman_rabi(const DetectionSetup& setup, const RamanPairConfig& pair, const Sublevel& upper,
                  const Sublevel& lower, LevelLabel via = LevelLabel::P12);
/// Two-photon detuning of that pair, including Zeeman shifts (rad/s).
double raman_pair_detuning(const DetectionSetup& setup, const RamanPairConfig& pair, const Sublevel& upper,
                           const Sublevel& lower);
/// Symmetric exchange rates from one Raman pair; zero emission.
RateMatrix raman_exchange_rates(const DetectionSetup& setup, const RamanPairConfig& pair);
/// |3,3> <-> |3,2> Rabi rate through P3/2 (rad/s). Diagnostic only.
double raman_via_p32_estimate(const DetectionSetup& setup, const RamanPairConfig& pair);
/// Smallest nonzero in-manifold Raman Rabi rate through P1/2 (rad/s).
double raman_min_in_manifold(const DetectionSetup& setup, const RamanPairConfig& pair);
double raman_max_in_manifold(const DetectionSetup& setup, const RamanPairConfig& pair);
/// Spontaneous scattering rate (1/s) out of `s` through P3/2 from all enabled
/// beams and Raman beams. Diagnostic only.
double p32_scattering_estimate(const DetectionSetup& setup, const Sublevel& s);

/// Scattering plus Raman exchange for the setup as configured.
RateMatrix detection_rate_matrix(const DetectionSetup& setup);

enum class EvolveMethod { Auto, MatrixExponential, Implicit };

/// exp(R t) p0 with clamping at -1e-12 and renormalization.
Eigen::VectorXd evolve_populations(const RateMatrix& R, const Eigen::VectorXd& p0, double t,
                                   EvolveMethod method = EvolveMethod::Auto);

/// Whether Auto would take the implicit integrator (rate span above 10^6).
bool is_stiff(const RateMatrix& R);

std::vector<Sublevel> find_dark_states(const RateMatrix& R, double threshold = 10.0);

/// Without a target: 1 / outflow of s. With a target set: exponential time
/// constant of transfer into the target starting from the quasi-stationary
/// distribution of the states reachable from s outside the target.
/// Returns +infinity when nothing flows out.
double depump_timescale(const RateMatrix& R, const Sublevel& s,
                        const std::optional<std::vector<Sublevel>>& target = std::nullopt);

enum class PrepVariant { Dark, Bright };

/// Setup with the beams of a preparation variant switched on: dark uses D1-D5
/// with the extra modulation on D1/D2, bright uses D3-D6. Raman pairs are kept.
DetectionSetup prep_setup(const DetectionSetup& setup, PrepVariant variant);

Eigen::VectorXd uniform_ground_distribution(const AtomModel& atom);

Eigen::VectorXd optical_pump_prepare(const DetectionSetup& setup, PrepVariant variant, double duration);
Eigen::VectorXd optical_pump_prepare(const DetectionSetup& setup, PrepVariant variant, double duration,
                                     const Eigen::VectorXd& p0);

/// Jump-process sampler for detection windows over one fixed rate matrix.
class DetectionSampler {
 public:
  explicit DetectionSampler(const DetectionSetup& setup);
  DetectionSampler(RateMatrix R, double window, double background_rate);

  /// Photon count for one window starting from a state drawn from p0.
  int sample(const Eigen::VectorXd& p0, std::uint64_t seed) const;
  /// N windows; window i uses derive_seed(seed, i).
  CountHistogram sample_batch(const Eigen::VectorXd& p0, std::int64_t events, std::uint64_t seed) const;

  const RateMatrix& rate_matrix() const { return R_; }

 private:
  RateMatrix R_;
  double window_;
  double background_rate_;
  std::vector<std::vector<double>> jump_cdf_;
};

int simulate_detection(const DetectionSetup& setup, const Eigen::VectorXd& p0, std::uint64_t seed);

}  // namespace ionstate
