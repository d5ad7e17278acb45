#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ionstate/angular.hpp"

namespace ionstate {

namespace constants {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;
inline constexpr double kElectronMass = 9.1093837015e-31;
inline constexpr double kSpeedOfLight = 299792458.0;
}  // namespace constants

enum class LevelLabel { S12, P12, D32, P32 };

std::string_view to_string(LevelLabel label);
LevelLabel parse_level_label(std::string_view text);

/// Fine-structure level with its hyperfine constants and decay data.
///
/// `gamma` is the natural linewidth as an angular frequency. It is zero for the
/// metastable levels (S1/2, D3/2). `decay_fractions` gives the partial decay
/// probability to each lower level and must sum to one for excited levels.
/// `coupling_scale` is the reduced dipole element relative to the P1/2 line
/// sharing the same lower level; only P3/2 uses it.
struct LevelSpec {
  LevelLabel label = LevelLabel::S12;
  int L = 0;
  HalfInt J = HalfInt::from_twice(1);
  HalfInt I = HalfInt::from_twice(3);
  double A_mhz = 0.0;
  double B_mhz = 0.0;
  double offset_thz = 0.0;
  double gamma = 0.0;
  std::map<LevelLabel, double> decay_fractions;
  double coupling_scale = 1.0;

  std::vector<HalfInt> allowed_F() const;
  bool allows_F(HalfInt F) const;
  bool is_excited() const { return gamma > 0.0; }
  /// Hyperfine energy of manifold F relative to the fine-structure centroid, in Hz.
  double hyperfine_shift_hz(HalfInt F) const;
  double lande_gJ() const;
  void validate() const;
};

/// Landé g_F for hyperfine manifold F of `level` (g_s = 2, nuclear moment
/// neglected). F = 0 returns 0.
double lande_gF(const LevelSpec& level, HalfInt F);

struct Sublevel {
  LevelLabel level = LevelLabel::S12;
  HalfInt F;
  HalfInt m;

  auto operator<=>(const Sublevel&) const = default;
  std::string str() const;
};

struct LevelOverride {
  std::optional<double> A_mhz;
  std::optional<double> B_mhz;
  std::optional<double> offset_thz;
  std::optional<double> linewidth_hz;  // gamma / 2pi
  std::optional<std::map<LevelLabel, double>> decay_fractions;
  std::optional<double> coupling_scale;
};

struct AtomOverrides {
  std::optional<HalfInt> nuclear_spin;
  std::optional<double> field_tesla;
  std::map<LevelLabel, LevelOverride> levels;
};

/// Level structure of a single ion in a static magnetic field.
///
/// Sublevels of every level except P3/2 are enumerated into a dense index
/// (level order S1/2, P1/2, D3/2; then F, then m ascending). P3/2 is kept
/// only as parameters for perturbative estimates.
class AtomModel {
 public:
  AtomModel(std::vector<LevelSpec> levels, double field_tesla);

  std::span<const LevelSpec> levels() const { return levels_; }
  bool has_level(LevelLabel label) const;
  const LevelSpec& level(LevelLabel label) const;
  double field_tesla() const { return field_tesla_; }

  std::span<const Sublevel> sublevels() const { return sublevels_; }
  std::optional<std::size_t> index_of(const Sublevel& s) const;
  /// Sublevels of one level, including P3/2.
  std::vector<Sublevel> sublevels_of(LevelLabel label) const;

  double lande_gF(const Sublevel& s) const;
  /// Linear Zeeman shift g_F mu_B m_F B / hbar in rad/s.
  double zeeman_shift(const Sublevel& s, double field_tesla) const;
  /// Energy / hbar relative to the S1/2 centroid, in rad/s, at the model field.
  double energy(const Sublevel& s) const;
  /// Zero-field hyperfine transition frequency between manifolds, in Hz.
  double transition_hz(LevelLabel lower, HalfInt F, LevelLabel upper, HalfInt Fp) const;
  /// Hyperfine interval E(F_a) - E(F_b) inside one level, in Hz.
  double hyperfine_interval_hz(LevelLabel label, HalfInt Fa, HalfInt Fb) const;

  /// Normalized electric-dipole amplitude for absorbing polarization q from
  /// lower sublevel g into excited sublevel e. Summing the square over every
  /// g in one lower level and every q gives 1.
  double dipole_amplitude(const Sublevel& e, const Sublevel& g, int q) const;
  /// Probability that spontaneous decay from e ends in g.
  double branching_ratio(const Sublevel& e, const Sublevel& g) const;

  AtomModel with_field(double field_tesla) const;

 private:
  std::vector<LevelSpec> levels_;
  double field_tesla_ = 0.0;
  std::vector<Sublevel> sublevels_;
  std::map<Sublevel, std::size_t> index_;
};

/// Default 137Ba+ constants, optionally overridden. Throws ValidationError when
/// an override breaks a level invariant.
AtomModel build_ba137(const AtomOverrides& overrides = {});

inline constexpr double kDefaultFieldTesla = 5e-4;

}  // namespace ionstate
