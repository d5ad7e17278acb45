#include "ionstate/atom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ionstate/errors.hpp"

namespace ionstate {

using constants::kTwoPi;

std::string_view to_string(LevelLabel label) {
  switch (label) {
    case LevelLabel::S12: return "S1/2";
    case LevelLabel::P12: return "P1/2";
    case LevelLabel::D32: return "D3/2";
    case LevelLabel::P32: return "P3/2";
  }
  return "?";
}

LevelLabel parse_level_label(std::string_view text) {
  for (auto l : {LevelLabel::S12, LevelLabel::P12, LevelLabel::D32, LevelLabel::P32}) {
    if (text == to_string(l)) return l;
  }
  throw ValidationError("unknown level label '" + std::string(text) + "'");
}

std::vector<HalfInt> LevelSpec::allowed_F() const {
  std::vector<HalfInt> out;
  for (HalfInt F = abs(J - I); F <= J + I; F += 1) out.push_back(F);
  return out;
}

bool LevelSpec::allows_F(HalfInt F) const {
  return F >= abs(J - I) && F <= J + I && (F - abs(J - I)).is_integer();
}

double LevelSpec::hyperfine_shift_hz(HalfInt F) const {
  const double f = F.value(), j = J.value(), i = I.value();
  const double K = f * (f + 1) - i * (i + 1) - j * (j + 1);
  double shift = 0.5 * A_mhz * K;
  if (I.twice() >= 2 && J.twice() >= 2) {
    shift += B_mhz * (1.5 * K * (K + 1) - 2.0 * i * (i + 1) * j * (j + 1)) /
             (4.0 * i * (2 * i - 1) * j * (2 * j - 1));
  }
  return shift * 1e6;
}

double LevelSpec::lande_gJ() const {
  constexpr double gs = 2.0;
  const double j = J.value(), l = L, s = 0.5;
  const double jj = j * (j + 1);
  return (jj - s * (s + 1) + l * (l + 1)) / (2 * jj) + gs * (jj + s * (s + 1) - l * (l + 1)) / (2 * jj);
}

void LevelSpec::validate() const {
  const std::string name(to_string(label));
  if (L < 0) throw ValidationError(name + ": negative L");
  if (I.twice() < 0) throw ValidationError(name + ": negative nuclear spin");
  if (J.is_integer() || std::abs(J.twice() - 2 * L) != 1) {
    throw ValidationError(name + ": J must be L +/- 1/2");
  }
  for (double v : {A_mhz, B_mhz, offset_thz, gamma, coupling_scale}) {
    if (!std::isfinite(v)) throw ValidationError(name + ": non-finite constant");
  }
  const bool p_level = label == LevelLabel::P12 || label == LevelLabel::P32;
  if (p_level && !(gamma > 0.0)) throw ValidationError(name + ": excited level needs gamma > 0");
  if (!p_level && gamma != 0.0) throw ValidationError(name + ": metastable level must have gamma = 0");
  if (p_level) {
    double total = 0.0;
    for (const auto& [dest, frac] : decay_fractions) {
      if (frac < 0.0) throw ValidationError(name + ": negative decay fraction");
      if (dest == label) throw ValidationError(name + ": decay into itself");
      total += frac;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ValidationError(name + ": decay fractions sum to " + std::to_string(total));
    }
  }
  if (coupling_scale < 0.0) throw ValidationError(name + ": negative coupling scale");
}

double lande_gF(const LevelSpec& level, HalfInt F) {
  if (!level.allows_F(F)) throw DomainError("lande_gF: F not allowed for level");
  if (F.twice() == 0) return 0.0;
  const double f = F.value(), j = level.J.value(), i = level.I.value();
  return level.lande_gJ() * (f * (f + 1) + j * (j + 1) - i * (i + 1)) / (2 * f * (f + 1));
}

std::string Sublevel::str() const {
  return std::string(to_string(level)) + "|F=" + F.str() + ",m=" + m.str() + ">";
}

AtomModel::AtomModel(std::vector<LevelSpec> levels, double field_tesla)
    : levels_(std::move(levels)), field_tesla_(field_tesla) {
  if (!(field_tesla_ >= 0.0) || !std::isfinite(field_tesla_)) {
    throw ValidationError("magnetic field must be finite and >= 0");
  }
  for (std::size_t a = 0; a < levels_.size(); ++a) {
    levels_[a].validate();
    for (std::size_t b = a + 1; b < levels_.size(); ++b) {
      if (levels_[a].label == levels_[b].label) throw ValidationError("duplicate level");
    }
  }
  for (auto label : {LevelLabel::S12, LevelLabel::P12, LevelLabel::D32}) {
    if (!has_level(label)) continue;
    for (const auto& s : sublevels_of(label)) {
      index_.emplace(s, sublevels_.size());
      sublevels_.push_back(s);
    }
  }
}

bool AtomModel::has_level(LevelLabel label) const {
  return std::any_of(levels_.begin(), levels_.end(), [&](const auto& l) { return l.label == label; });
}

const LevelSpec& AtomModel::level(LevelLabel label) const {
  for (const auto& l : levels_) {
    if (l.label == label) return l;
  }
  throw ValidationError("model has no level " + std::string(to_string(label)));
}

std::optional<std::size_t> AtomModel::index_of(const Sublevel& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Sublevel> AtomModel::sublevels_of(LevelLabel label) const {
  std::vector<Sublevel> out;
  for (HalfInt F : level(label).allowed_F()) {
    for (HalfInt m = -F; m <= F; m += 1) out.push_back({label, F, m});
  }
  return out;
}

double AtomModel::lande_gF(const Sublevel& s) const { return ionstate::lande_gF(level(s.level), s.F); }

double AtomModel::zeeman_shift(const Sublevel& s, double field_tesla) const {
  if (field_tesla < 0.0) throw DomainError("zeeman_shift: negative field");
  return lande_gF(s) * constants::kBohrMagneton * s.m.value() * field_tesla / constants::kHbar;
}

double AtomModel::energy(const Sublevel& s) const {
  const auto& l = level(s.level);
  return kTwoPi * (l.offset_thz * 1e12 + l.hyperfine_shift_hz(s.F)) + zeeman_shift(s, field_tesla_);
}

double AtomModel::transition_hz(LevelLabel lower, HalfInt F, LevelLabel upper, HalfInt Fp) const {
  const auto& lo = level(lower);
  const auto& up = level(upper);
  return (up.offset_thz - lo.offset_thz) * 1e12 + up.hyperfine_shift_hz(Fp) - lo.hyperfine_shift_hz(F);
}

double AtomModel::hyperfine_interval_hz(LevelLabel label, HalfInt Fa, HalfInt Fb) const {
  const auto& l = level(label);
  return l.hyperfine_shift_hz(Fa) - l.hyperfine_shift_hz(Fb);
}

double AtomModel::dipole_amplitude(const Sublevel& e, const Sublevel& g, int q) const {
  const auto& up = level(e.level);
  const auto& lo = level(g.level);
  if (q < -1 || q > 1) throw DomainError("dipole_amplitude: q must be -1, 0 or +1");
  if (!up.is_excited()) throw DomainError("dipole_amplitude: upper sublevel is not in an excited level");
  if (lo.is_excited()) throw DomainError("dipole_amplitude: lower sublevel is in an excited level");
  if ((up.L - lo.L) % 2 == 0) throw DomainError("dipole_amplitude: levels have the same parity");
  if (!up.allows_F(e.F) || !lo.allows_F(g.F) || abs(e.m) > e.F || abs(g.m) > g.F) {
    throw DomainError("dipole_amplitude: invalid sublevel");
  }
  if (e.m != g.m + q) return 0.0;
  if (!triangle(e.F, 1, g.F)) return 0.0;
  const HalfInt one = 1;
  const double three_j = wigner3j(e.F, one, g.F, -e.m, HalfInt(q), g.m);
  const double six_j = wigner6j(up.J, e.F, up.I, g.F, lo.J, one);
  const int phase_twice = (e.F - e.m).twice() + (up.J + up.I + g.F + one).twice();
  const double phase = ((phase_twice / 2) % 2 == 0) ? 1.0 : -1.0;
  return phase * std::sqrt((up.J.twice() + 1.0) * (e.F.twice() + 1.0) * (g.F.twice() + 1.0)) * three_j *
         six_j;
}

double AtomModel::branching_ratio(const Sublevel& e, const Sublevel& g) const {
  const auto& up = level(e.level);
  const auto& lo = level(g.level);
  if (!up.is_excited() || lo.is_excited()) throw DomainError("branching_ratio: need excited -> lower");
  auto it = up.decay_fractions.find(g.level);
  if (it == up.decay_fractions.end() || (up.L - lo.L) % 2 == 0) return 0.0;
  const HalfInt q_half = e.m - g.m;
  if (abs(q_half) > HalfInt(1) || !q_half.is_integer()) return 0.0;
  const double amp = dipole_amplitude(e, g, q_half.as_int());
  return it->second * amp * amp;
}

AtomModel AtomModel::with_field(double field_tesla) const { return AtomModel(levels_, field_tesla); }

AtomModel build_ba137(const AtomOverrides& overrides) {
  using L = LevelLabel;
  const HalfInt I = overrides.nuclear_spin.value_or(HalfInt::from_twice(3));

  LevelSpec s{L::S12, 0, HalfInt::from_twice(1), I, 4018.0, 0.0, 0.0, 0.0, {}, 1.0};
  LevelSpec p12{L::P12, 1, HalfInt::from_twice(1), I, 744.0, 0.0, 607.426, kTwoPi * 20.1e6,
                {{L::S12, 0.732}, {L::D32, 0.268}}, 1.0};
  LevelSpec d32{L::D32, 2, HalfInt::from_twice(3), I, 189.73, 44.54, 146.116, 0.0, {}, 1.0};
  // The D5/2 channel of P3/2 is folded into S1/2 and D3/2 since D5/2 is not modeled.
  LevelSpec p32{L::P32, 1, HalfInt::from_twice(3), I, 113.0, 59.0, 607.426 + 50.0, kTwoPi * 25.4e6,
                {{L::S12, 0.963}, {L::D32, 0.037}}, 0.317};

  std::vector<LevelSpec> levels{s, p12, d32, p32};
  for (auto& lvl : levels) {
    auto it = overrides.levels.find(lvl.label);
    if (it == overrides.levels.end()) continue;
    const auto& o = it->second;
    if (o.A_mhz) lvl.A_mhz = *o.A_mhz;
    if (o.B_mhz) lvl.B_mhz = *o.B_mhz;
    if (o.offset_thz) lvl.offset_thz = *o.offset_thz;
    if (o.linewidth_hz) lvl.gamma = kTwoPi * *o.linewidth_hz;
    if (o.decay_fractions) lvl.decay_fractions = *o.decay_fractions;
    if (o.coupling_scale) lvl.coupling_scale = *o.coupling_scale;
  }
  return AtomModel(std::move(levels), overrides.field_tesla.value_or(kDefaultFieldTesla));
}

}  // namespace ionstate
