#pragma once

#include <string_view>

#include "ionstate/pumping.hpp"

namespace ionstate::presets {

/// Shipped calibration profile for the detection scheme.
///
/// Beam powers are not measured quantities here. The Rabi rates below are
/// chosen so the model reproduces the observed scales: about 8.7 detected
/// counts per 1 ms bright window, tens of microseconds to clear
/// |F''=3, m<3>, and a largest in-manifold Raman Rabi rate near 2pi x 0.5 MHz.
struct Calibration {
  double cooling_rabi_hz = 6.0e6;     // D1, D2
  double cooling_detuning_hz = -10e6;
  double repump_rabi_hz = 15.0e6;     // D3, D4
  double repump_f0_rabi_hz = 27.0e6;  // D5
  double clear_rabi_hz = 10.0e6;      // D6
  double raman_rabi_hz = 1.83e9;      // R1, R2
  double raman_detuning_hz = -1.0e12;
  double collection_efficiency = 6.55e-3;
  double background_rate = 440.0;
  double window = 1e-3;
  double prep_modulation_hz = 1.488e9;
};

/// D1-D5 and the Raman pair enabled, D6 defined but off.
/// Beam targets: D1/D2 S1/2 F=1 -> F'=1 (sigma+/sigma-) with a sideband on
/// F=2 -> F'=1; D3, D4, D5 drive F''=2, 1, 0 -> F'=1 with pi light; D6 drives
/// F''=3 -> F'=2 with light polarized perpendicular to the field.
DetectionSetup detection_setup(const AtomModel& atom, const Calibration& cal = {});
DetectionSetup detection_setup();

/// Cutoff used to keep only near-resonant couplings (rad/s).
inline constexpr double kResonantCutoff = constants::kTwoPi * 100e6;

DetectionSetup with_beam(DetectionSetup setup, std::string_view name, bool enabled);
DetectionSetup without_raman(DetectionSetup setup);
DetectionSetup with_resonant_only(DetectionSetup setup, double cutoff = kResonantCutoff);
/// Applies the same extinction ratio to every pi-polarized beam.
DetectionSetup with_pi_extinction(DetectionSetup setup, double extinction_db);

BeamConfig& beam(DetectionSetup& setup, std::string_view name);
const BeamConfig& beam(const DetectionSetup& setup, std::string_view name);

}  // namespace ionstate::presets
