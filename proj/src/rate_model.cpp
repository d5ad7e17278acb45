#include <cmath>
#include <numeric>

#include "ionstate/errors.hpp"
#include "ionstate/pumping.hpp"

namespace ionstate {

using constants::kTwoPi;
using cplx = std::complex<double>;

namespace polarization {
Polarization pi() { return {cplx(0), cplx(1), cplx(0)}; }
Polarization sigma_plus() { return {cplx(0), cplx(0), cplx(1)}; }
Polarization sigma_minus() { return {cplx(1), cplx(0), cplx(0)}; }
Polarization perpendicular() {
  const double r = 1.0 / std::sqrt(2.0);
  return {cplx(r), cplx(0), cplx(-r)};
}
}  // namespace polarization

namespace {

constexpr double kUnwanted = 1e-12;

bool is_lower_level(LevelLabel l) { return l == LevelLabel::S12 || l == LevelLabel::D32; }

}  // namespace

void BeamConfig::validate() const {
  if (upper == LevelLabel::P32 || lower == LevelLabel::P32) {
    throw UnsupportedConfiguration("beam '" + name + "' drives P3/2, which is only treated perturbatively");
  }
  if (upper != LevelLabel::P12 || !is_lower_level(lower)) {
    throw ValidationError("beam '" + name + "' must drive S1/2 or D3/2 to P1/2");
  }
  double norm = 0.0;
  for (const auto& w : pol) norm += std::norm(w);
  if (std::abs(norm - 1.0) > 1e-9) throw ValidationError("beam '" + name + "': polarization weights not normalized");
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw ValidationError("beam '" + name + "': Rabi rate must be >= 0");
  if (!std::isfinite(detuning)) throw ValidationError("beam '" + name + "': non-finite detuning");
  if (extinction_db && !(*extinction_db >= 0.0)) {
    throw ValidationError("beam '" + name + "': extinction must be >= 0 dB");
  }
  for (const auto& sb : sidebands) {
    if (!std::isfinite(sb.offset) || !std::isfinite(sb.amplitude) || sb.amplitude < 0.0) {
      throw ValidationError("beam '" + name + "': bad sideband");
    }
  }
}

std::array<double, 3> BeamConfig::power_weights() const {
  const auto f = field_weights();
  return {std::norm(f[0]), std::norm(f[1]), std::norm(f[2])};
}

Polarization BeamConfig::field_weights() const {
  if (!extinction_db) return pol;
  const double leak = std::pow(10.0, -*extinction_db / 10.0);
  int unwanted = 0;
  for (const auto& w : pol) unwanted += std::norm(w) < kUnwanted;
  if (unwanted == 0) return pol;
  Polarization out{};
  for (int q = 0; q < 3; ++q) {
    out[q] = std::norm(pol[q]) < kUnwanted ? cplx(std::sqrt(leak / unwanted)) : pol[q] * std::sqrt(1.0 - leak);
  }
  return out;
}

double BeamConfig::carrier_frequency(const AtomModel& atom) const {
  return kTwoPi * atom.transition_hz(lower, lower_F, upper, upper_F) + detuning;
}

void RamanPairConfig::validate(const AtomModel& atom) const {
  for (const auto* b : {&pi_beam, &sigma_beam}) {
    b->validate();
    if (b->lower != LevelLabel::D32) throw ValidationError("Raman pair '" + name + "' beams must address D3/2");
  }
  const double gamma = atom.level(LevelLabel::P12).gamma;
  if (!(std::abs(single_photon_detuning) > 100.0 * gamma)) {
    throw ValidationError("Raman pair '" + name + "': |single-photon detuning| must exceed 100 gamma");
  }
  if (!std::isfinite(two_photon_detuning)) throw ValidationError("Raman pair '" + name + "': bad two-photon detuning");
}

std::array<BeamConfig, 2> RamanPairConfig::effective_beams(const AtomModel& atom) const {
  const auto& d = atom.level(LevelLabel::D32);
  const auto& p = atom.level(LevelLabel::P12);
  const HalfInt f_ref = d.allowed_F().back();
  const HalfInt fp_ref = p.allowed_F().back();
  const double line = kTwoPi * (p.offset_thz - d.offset_thz) * 1e12;
  const double zeeman = lande_gF(d, f_ref) * constants::kBohrMagneton * atom.field_tesla() / constants::kHbar;
  const double omega_pi = line + single_photon_detuning;
  const double omega_sigma = omega_pi + zeeman + two_photon_detuning;
  const double reference = kTwoPi * atom.transition_hz(LevelLabel::D32, f_ref, LevelLabel::P12, fp_ref);

  std::array<BeamConfig, 2> out{pi_beam, sigma_beam};
  const double freqs[2] = {omega_pi, omega_sigma};
  for (int i = 0; i < 2; ++i) {
    out[i].lower = LevelLabel::D32;
    out[i].lower_F = f_ref;
    out[i].upper = LevelLabel::P12;
    out[i].upper_F = fp_ref;
    out[i].detuning = freqs[i] - reference;
  }
  return out;
}

void DetectionSetup::validate() const {
  // Zero is accepted: a background-only run is a useful reference.
  if (!(collection_efficiency >= 0.0 && collection_efficiency <= 1.0)) {
    throw ValidationError("collection efficiency must be in [0, 1]");
  }
  if (!(window > 0.0) || !std::isfinite(window)) throw ValidationError("detection window must be > 0");
  if (!(background_rate >= 0.0) || !std::isfinite(background_rate)) throw ValidationError("background rate must be >= 0");
  if (!(detuning_cutoff > 0.0)) throw ValidationError("detuning cutoff must be > 0");
  for (const auto& b : beams) {
    b.validate();
    if (!atom.level(b.lower).allows_F(b.lower_F) || !atom.level(b.upper).allows_F(b.upper_F)) {
      throw ValidationError("beam '" + b.name + "' targets a hyperfine level the atom does not have");
    }
  }
  for (const auto& r : raman_pairs) r.validate(atom);
}

RateMatrix RateMatrix::zero(std::vector<Sublevel> states) {
  RateMatrix R;
  const auto n = static_cast<Eigen::Index>(states.size());
  R.states = std::move(states);
  R.rates = Eigen::MatrixXd::Zero(n, n);
  R.emission = Eigen::VectorXd::Zero(n);
  return R;
}

std::optional<std::size_t> RateMatrix::index_of(const Sublevel& s) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == s) return i;
  }
  return std::nullopt;
}

std::size_t RateMatrix::require_index(const Sublevel& s) const {
  auto i = index_of(s);
  if (!i) throw ValidationError("state " + s.str() + " is not in the rate matrix");
  return *i;
}

RateMatrix& RateMatrix::operator+=(const RateMatrix& other) {
  if (other.states != states) throw ValidationError("rate matrices over different state spaces");
  rates += other.rates;
  emission += other.emission;
  return *this;
}

std::vector<Sublevel> ground_states(const AtomModel& atom) {
  std::vector<Sublevel> out;
  for (const auto& s : atom.sublevels()) {
    if (!atom.level(s.level).is_excited()) out.push_back(s);
  }
  return out;
}

namespace {

struct ExcitedInfo {
  Sublevel e;
  double energy;
  std::vector<double> branching;  // into each ground state
};

std::vector<ExcitedInfo> excited_table(const AtomModel& atom, const std::vector<Sublevel>& ground) {
  std::vector<ExcitedInfo> out;
  for (const auto& e : atom.sublevels_of(LevelLabel::P12)) {
    ExcitedInfo info{e, atom.energy(e), {}};
    info.branching.reserve(ground.size());
    for (const auto& g : ground) info.branching.push_back(atom.branching_ratio(e, g));
    out.push_back(std::move(info));
  }
  return out;
}

// Adds the optical pumping of one beam. `excitation` accumulates the total
// excitation rate out of each ground state.
void add_beam(const AtomModel& atom, const BeamConfig& beam, double cutoff, const std::vector<Sublevel>& ground,
              const std::vector<ExcitedInfo>& excited, Eigen::MatrixXd& rates, Eigen::VectorXd& excitation) {
  if (beam.rabi == 0.0) return;
  const double gamma = atom.level(LevelLabel::P12).gamma;
  const auto power = beam.power_weights();
  const double carrier = beam.carrier_frequency(atom);
  std::vector<Sideband> components{{0.0, 1.0}};
  components.insert(components.end(), beam.sidebands.begin(), beam.sidebands.end());

  for (std::size_t gi = 0; gi < ground.size(); ++gi) {
    const auto& g = ground[gi];
    if (g.level != beam.lower) continue;
    const double eg = atom.energy(g);
    for (const auto& ex : excited) {
      const HalfInt dq = ex.e.m - g.m;
      if (abs(dq) > HalfInt(1)) continue;
      const int q = dq.as_int();
      if (power[q + 1] == 0.0) continue;
      const double amp = atom.dipole_amplitude(ex.e, g, q);
      if (amp == 0.0) continue;
      const double resonance = ex.energy - eg;
      double rate = 0.0;
      for (const auto& c : components) {
        const double delta = carrier + c.offset - resonance;
        if (std::abs(delta) > cutoff) continue;
        const double omega2 = beam.rabi * beam.rabi * c.amplitude * c.amplitude * power[q + 1] * amp * amp;
        rate += gamma * (omega2 / 4.0) / (delta * delta + gamma * gamma / 4.0);
      }
      if (rate == 0.0) continue;
      excitation(gi) += rate;
      for (std::size_t to = 0; to < ground.size(); ++to) {
        if (to != gi) rates(to, gi) += rate * ex.branching[to];
      }
    }
  }
}

void fix_diagonal(Eigen::MatrixXd& rates) {
  for (Eigen::Index j = 0; j < rates.cols(); ++j) {
    rates(j, j) = 0.0;
    rates(j, j) = -rates.col(j).sum();
  }
}

}  // namespace

RateMatrix scattering_rate_matrix(const DetectionSetup& setup) {
  setup.validate();
  const auto& atom = setup.atom;
  auto R = RateMatrix::zero(ground_states(atom));
  if (!atom.has_level(LevelLabel::P12)) return R;
  const auto excited = excited_table(atom, R.states);
  Eigen::VectorXd excitation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R.size()));
  for (const auto& beam : setup.beams) {
    if (beam.enabled) add_beam(atom, beam, setup.detuning_cutoff, R.states, excited, R.rates, excitation);
  }
  for (const auto& pair : setup.raman_pairs) {
    for (const auto& beam : pair.effective_beams(atom)) {
      add_beam(atom, beam, setup.detuning_cutoff, R.states, excited, R.rates, excitation);
    }
  }
  fix_diagonal(R.rates);
  R.emission = setup.collection_efficiency * excitation;
  return R;
}

double raman_rabi(const DetectionSetup& setup, const RamanPairConfig& pair, const Sublevel& upper,
                  const Sublevel& lower, LevelLabel via) {
  const auto& atom = setup.atom;
  const auto beams = pair.effective_beams(atom);
  const auto w1 = beams[0].field_weights();
  const auto w2 = beams[1].field_weights();
  const double omega1 = beams[0].carrier_frequency(atom);
  const double scale = atom.level(via).coupling_scale;
  const double e_upper = atom.energy(upper);

  cplx total = 0.0;
  for (const auto& e : atom.sublevels_of(via)) {
    const HalfInt d1 = e.m - upper.m;
    const HalfInt d2 = e.m - lower.m;
    if (abs(d1) > HalfInt(1) || abs(d2) > HalfInt(1)) continue;
    const int q1 = d1.as_int(), q2 = d2.as_int();
    const double a1 = atom.dipole_amplitude(e, upper, q1);
    const double a2 = atom.dipole_amplitude(e, lower, q2);
    if (a1 == 0.0 || a2 == 0.0) continue;
    const cplx leg1 = beams[0].rabi * scale * a1 * std::conj(w1[q1 + 1]);
    const cplx leg2 = beams[1].rabi * scale * a2 * w2[q2 + 1];
    const double delta = omega1 - (atom.energy(e) - e_upper);
    total += leg1 * leg2 / (2.0 * delta);
  }
  return std::abs(total);
}

double raman_pair_detuning(const DetectionSetup& setup, const RamanPairConfig& pair, const Sublevel& upper,
                           const Sublevel& lower) {
  const auto& atom = setup.atom;
  const auto beams = pair.effective_beams(atom);
  return (beams[1].carrier_frequency(atom) - beams[0].carrier_frequency(atom)) -
         (atom.energy(upper) - atom.energy(lower));
}

namespace {

template <typename Fn>
void for_each_raman_pair(const AtomModel& atom, Fn&& fn) {
  for (HalfInt F : atom.level(LevelLabel::D32).allowed_F()) {
    for (HalfInt m = -F + 1; m <= F; m += 1) {
      fn(Sublevel{LevelLabel::D32, F, m}, Sublevel{LevelLabel::D32, F, m - 1});
    }
  }
}

}  // namespace

RateMatrix raman_exchange_rates(const DetectionSetup& setup, const RamanPairConfig& pair) {
  pair.validate(setup.atom);
  auto R = RateMatrix::zero(ground_states(setup.atom));
  for_each_raman_pair(setup.atom, [&](const Sublevel& upper, const Sublevel& lower) {
    const double omega = raman_rabi(setup, pair, upper, lower);
    if (omega == 0.0) return;
    const double delta = raman_pair_detuning(setup, pair, upper, lower);
    const double half = omega / 2.0;
    const double lorentz = half * half / (delta * delta + half * half);
    const double k = half * lorentz;
    const auto iu = R.require_index(upper), il = R.require_index(lower);
    R.rates(iu, il) += k;
    R.rates(il, iu) += k;
  });
  fix_diagonal(R.rates);
  return R;
}

double raman_via_p32_estimate(const DetectionSetup& setup, const RamanPairConfig& pair) {
  if (!setup.atom.has_level(LevelLabel::P32)) throw ValidationError("atom model has no P3/2 parameters");
  const HalfInt F = setup.atom.level(LevelLabel::D32).allowed_F().back();
  return raman_rabi(setup, pair, {LevelLabel::D32, F, F}, {LevelLabel::D32, F, F - 1}, LevelLabel::P32);
}

double raman_min_in_manifold(const DetectionSetup& setup, const RamanPairConfig& pair) {
  double best = kInfinity;
  for_each_raman_pair(setup.atom, [&](const Sublevel& u, const Sublevel& l) {
    const double omega = raman_rabi(setup, pair, u, l);
    if (omega > 0.0) best = std::min(best, omega);
  });
  return best;
}

double raman_max_in_manifold(const DetectionSetup& setup, const RamanPairConfig& pair) {
  double best = 0.0;
  for_each_raman_pair(setup.atom, [&](const Sublevel& u, const Sublevel& l) {
    best = std::max(best, raman_rabi(setup, pair, u, l));
  });
  return best;
}

double p32_scattering_estimate(const DetectionSetup& setup, const Sublevel& s) {
  const auto& atom = setup.atom;
  if (!atom.has_level(LevelLabel::P32)) throw ValidationError("atom model has no P3/2 parameters");
  const auto& p32 = atom.level(LevelLabel::P32);
  std::vector<BeamConfig> beams;
  for (const auto& b : setup.beams) {
    if (b.enabled) beams.push_back(b);
  }
  for (const auto& pair : setup.raman_pairs) {
    for (const auto& b : pair.effective_beams(atom)) beams.push_back(b);
  }
  const double es = atom.energy(s);
  double rate = 0.0;
  for (const auto& beam : beams) {
    if (beam.lower != s.level) continue;
    const auto power = beam.power_weights();
    const double carrier = beam.carrier_frequency(atom);
    for (const auto& e : atom.sublevels_of(LevelLabel::P32)) {
      const HalfInt dq = e.m - s.m;
      if (abs(dq) > HalfInt(1)) continue;
      const int q = dq.as_int();
      const double amp = atom.dipole_amplitude(e, s, q) * p32.coupling_scale;
      const double omega2 = beam.rabi * beam.rabi * power[q + 1] * amp * amp;
      const double delta = carrier - (atom.energy(e) - es);
      rate += p32.gamma * (omega2 / 4.0) / (delta * delta + p32.gamma * p32.gamma / 4.0);
    }
  }
  return rate;
}

RateMatrix detection_rate_matrix(const DetectionSetup& setup) {
  auto R = scattering_rate_matrix(setup);
  for (const auto& pair : setup.raman_pairs) R += raman_exchange_rates(setup, pair);
  return R;
}

}  // namespace ionstate
