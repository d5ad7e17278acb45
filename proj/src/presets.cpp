#include "ionstate/presets.hpp"

#include "ionstate/errors.hpp"

namespace ionstate::presets {

using constants::kTwoPi;

namespace {

BeamConfig make_beam(std::string name, LevelLabel lower, int F, int Fp, Polarization pol, double rabi_hz) {
  BeamConfig b;
  b.name = std::move(name);
  b.lower = lower;
  b.lower_F = F;
  b.upper = LevelLabel::P12;
  b.upper_F = Fp;
  b.pol = pol;
  b.rabi = kTwoPi * rabi_hz;
  return b;
}

}  // namespace

DetectionSetup detection_setup(const AtomModel& atom, const Calibration& cal) {
  DetectionSetup setup;
  setup.atom = atom;
  const double ground_split = atom.hyperfine_interval_hz(LevelLabel::S12, 2, 1);

  for (auto [name, pol] : {std::pair{"D1", polarization::sigma_plus()}, std::pair{"D2", polarization::sigma_minus()}}) {
    auto b = make_beam(name, LevelLabel::S12, 1, 1, pol, cal.cooling_rabi_hz);
    b.detuning = kTwoPi * cal.cooling_detuning_hz;
    // F=2 lies above F=1, so its line to F'=1 is lower in frequency.
    b.sidebands.push_back({-kTwoPi * ground_split, 1.0});
    setup.beams.push_back(b);
  }
  setup.beams.push_back(make_beam("D3", LevelLabel::D32, 2, 1, polarization::pi(), cal.repump_rabi_hz));
  setup.beams.push_back(make_beam("D4", LevelLabel::D32, 1, 1, polarization::pi(), cal.repump_rabi_hz));
  setup.beams.push_back(make_beam("D5", LevelLabel::D32, 0, 1, polarization::pi(), cal.repump_f0_rabi_hz));
  auto d6 = make_beam("D6", LevelLabel::D32, 3, 2, polarization::perpendicular(), cal.clear_rabi_hz);
  d6.enabled = false;
  setup.beams.push_back(d6);

  RamanPairConfig pair;
  pair.name = "R";
  pair.pi_beam = make_beam("R1", LevelLabel::D32, 3, 2, polarization::pi(), cal.raman_rabi_hz);
  pair.sigma_beam = make_beam("R2", LevelLabel::D32, 3, 2, polarization::sigma_plus(), cal.raman_rabi_hz);
  pair.single_photon_detuning = kTwoPi * cal.raman_detuning_hz;
  pair.two_photon_detuning = 0.0;
  setup.raman_pairs.push_back(pair);

  setup.collection_efficiency = cal.collection_efficiency;
  setup.background_rate = cal.background_rate;
  setup.window = cal.window;
  setup.prep_modulation = kTwoPi * cal.prep_modulation_hz;
  setup.prep_modulation_amplitude = 1.0;
  return setup;
}

DetectionSetup detection_setup() { return detection_setup(build_ba137()); }

BeamConfig& beam(DetectionSetup& setup, std::string_view name) {
  for (auto& b : setup.beams) {
    if (b.name == name) return b;
  }
  throw ValidationError("setup has no beam named '" + std::string(name) + "'");
}

const BeamConfig& beam(const DetectionSetup& setup, std::string_view name) {
  for (const auto& b : setup.beams) {
    if (b.name == name) return b;
  }
  throw ValidationError("setup has no beam named '" + std::string(name) + "'");
}

DetectionSetup with_beam(DetectionSetup setup, std::string_view name, bool enabled) {
  beam(setup, name).enabled = enabled;
  return setup;
}

DetectionSetup without_raman(DetectionSetup setup) {
  setup.raman_pairs.clear();
  return setup;
}

DetectionSetup with_resonant_only(DetectionSetup setup, double cutoff) {
  setup.detuning_cutoff = cutoff;
  return setup;
}

DetectionSetup with_pi_extinction(DetectionSetup setup, double extinction_db) {
  const auto nominal_pi = polarization::pi();
  for (auto& b : setup.beams) {
    if (b.pol == nominal_pi) b.extinction_db = extinction_db;
  }
  return setup;
}

}  // namespace ionstate::presets
