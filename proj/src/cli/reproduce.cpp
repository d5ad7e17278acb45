#include <cmath>
#include <set>
#include <sstream>

#include "cli/commands.hpp"
#include "ionstate/errors.hpp"
#include "ionstate/histfit.hpp"
#include "ionstate/rng.hpp"

namespace ionstate::cli {

using nlohmann::json;
using constants::kTwoPi;

namespace {

struct Summary {
  double scale;
  json rows = json::array();
  bool all_pass = true;

  void check(const std::string& name, double value, double reference, double tolerance, const std::string& unit = "") {
    const double tol = tolerance * scale;
    const bool pass = std::isfinite(value) && std::abs(value - reference) <= tol;
    rows.push_back({{"name", name}, {"value", value}, {"reference", reference}, {"tolerance", tol},
                    {"unit", unit}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void check_range(const std::string& name, double value, double lo, double hi, const std::string& unit = "") {
    // The scale shrinks the interval about its midpoint.
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * scale;
    const bool pass = std::isfinite(value) && value >= mid - half && value <= mid + half;
    rows.push_back({{"name", name}, {"value", value}, {"lower", mid - half}, {"upper", mid + half},
                    {"unit", unit}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void check_set(const std::string& name, const std::set<std::string>& got, const std::set<std::string>& want) {
    const bool pass = got == want;
    rows.push_back({{"name", name}, {"value", json(got)}, {"reference", json(want)}, {"pass", pass}});
    all_pass = all_pass && pass;
  }
  void info(const std::string& name, double value, double reference, const std::string& unit, const std::string& note) {
    rows.push_back({{"name", name}, {"value", value}, {"reference", reference}, {"unit", unit},
                    {"informational", true}, {"note", note}});
  }
};

std::set<std::string> dark_names(const DetectionSetup& setup) {
  std::set<std::string> out;
  for (const auto& s : find_dark_states(detection_rate_matrix(setup))) out.insert(s.str());
  return out;
}

}  // namespace

int cmd_reproduce(const Context& ctx, double tolerance_scale) {
  if (!(tolerance_scale >= 0.0)) throw ValidationError("tolerance scale must be >= 0");
  Summary sum{tolerance_scale};
  const auto& cfg = ctx.config;
  const std::uint64_t seed = cfg.seed;
  const auto setup = cfg.detection_setup();
  const auto& atom = setup.atom;

  // Level structure.
  sum.check("s12_splitting_hz", std::abs(atom.hyperfine_interval_hz(LevelLabel::S12, 2, 1)), 8.036e9, 1e6, "Hz");
  sum.check("p12_splitting_hz", std::abs(atom.hyperfine_interval_hz(LevelLabel::P12, 2, 1)), 1.488e9, 5e6, "Hz");
  sum.check("d5_detuning_from_f3_f2_hz",
            std::abs(atom.transition_hz(LevelLabel::D32, 0, LevelLabel::P12, 1) - atom.transition_hz(LevelLabel::D32, 3, LevelLabel::P12, 2)),
            394e6, 10e6, "Hz");
  sum.check("branching_p2_2_to_d3_3",
            atom.branching_ratio(Sublevel{LevelLabel::P12, 2, 2}, Sublevel{LevelLabel::D32, 3, 3}), 0.125, 0.025);

  // Dark states.
  std::set<std::string> unwanted;
  for (const auto& s : atom.sublevels()) {
    if (s.level != LevelLabel::D32) continue;
    const bool f1m0 = s.F == HalfInt(1) && s.m == HalfInt(0);
    const bool f2m2 = s.F == HalfInt(2) && abs(s.m) == HalfInt(2);
    if (f1m0 || f2m2 || s.F == HalfInt(3)) unwanted.insert(s.str());
  }
  sum.check_set("dark_states_resonant_without_raman",
                dark_names(presets::with_resonant_only(presets::without_raman(setup))), unwanted);
  sum.check_set("dark_states_full", dark_names(setup), {Sublevel{LevelLabel::D32, 3, 3}.str()});
  sum.check_set("dark_states_with_d6", dark_names(presets::with_beam(setup, "D6", true)), {});

  // Calibrated pumping scales.
  {
    const auto t = compute_timescales(setup, 30.0);
    sum.check_range("clear_f3_low_s", t.clear_f3_low, 10e-6, 100e-6, "s");
    sum.check_range("dark_depump_30db_s", t.dark_depump, 10e-3, 60e-3, "s");
    sum.check_range("raman_via_p32_hz", t.raman_via_p32, 0.0, 5e3, "Hz");
    sum.check_range("raman_in_manifold_over_via_p32", t.raman_max / t.raman_via_p32, 100.0, 1e9);
  }

  // Simulated detection experiment.
  {
    const DetectionSampler sampler(setup);
    const auto pb = optical_pump_prepare(setup, PrepVariant::Bright, 1e-3);
    const auto pd = optical_pump_prepare(setup, PrepVariant::Dark, 1e-3);
    const auto hb = sampler.sample_batch(pb, 10000, derive_seed(seed, 1));
    const auto hd = sampler.sample_batch(pd, 10000, derive_seed(seed, 2));
    const auto fit = fit_histograms(hb, hd, setup.window);
    sum.check("simulated_nbar_bright", fit.model.nbar_bright, 8.7, 0.5);
    sum.check("simulated_nbar_dark", fit.model.nbar_dark, 0.44, 0.06);
    sum.info("simulated_tau_bright_s", fit.model.tau_bright, 3.4e-3, "s",
             "depumping in the rate model is slower than measured");
    sum.info("simulated_tau_dark_s", fit.model.tau_dark, 5.8e-3, "s",
             "the shipped beams have ideal polarization, so the dark state barely depumps");
    sum.info("simulated_chi2_reduced", fit.chi2_reduced, 0.91, "",
             "the simulated process is not exactly single-jump");
    sum.info("simulated_fidelity", detection_fidelity(fit.model), 0.896, "", "follows from the simulated depumping");
  }

  // Photon statistics of the measured parameters.
  {
    const HistogramModel m{0.44, 8.7, 5.8e-3, 3.4e-3, 1e-3};
    sum.check("p_bright_zero", bright_pmf(m, 0), 0.023, 0.002);
    sum.check("detection_fidelity", detection_fidelity(m), 0.896, 0.010);
    const auto hb = telegraph_histogram(m, StateLabel::Bright, 10000, derive_seed(seed, 3));
    const auto hd = telegraph_histogram(m, StateLabel::Dark, 10000, derive_seed(seed, 4));
    const auto fit = fit_histograms(hb, hd, m.window);
    sum.check("roundtrip_nbar_dark", fit.model.nbar_dark, m.nbar_dark, 0.06);
    sum.check("roundtrip_nbar_bright", fit.model.nbar_bright, m.nbar_bright, 0.3);
    sum.check("roundtrip_tau_dark_s", fit.model.tau_dark, m.tau_dark, 1.2e-3, "s");
    sum.check("roundtrip_tau_bright_s", fit.model.tau_bright, m.tau_bright, 0.6e-3, "s");
    // Sampling spread of the reduced chi-square at this number of groups.
    const double spread = fit.dof > 0 ? 3.0 * std::sqrt(2.0 / fit.dof) : 1.0;
    sum.check("roundtrip_chi2_reduced", fit.chi2_reduced, 1.0, spread);
  }

  // Raman transfer.
  {
    const auto& tc = cfg.transfer;
    sum.check("lamb_dicke_eta", lamb_dicke(tc), 0.044, 0.001);
    sum.check_range("doppler_limit_over_nbar", doppler_limit(tc) / 14.0, 5.0, 10.0);
    const auto mn = first_minimum(tc);
    sum.check_range("rabi_first_minimum_ns", mn.t * 1e9, 180.0, 220.0, "ns");
    sum.check_range("rabi_minimum_p_bright", mn.p_bright, 0.0, 0.03);
    std::vector<double> times(25);
    for (int i = 0; i < 25; ++i) times[i] = 1e-6 * i / 24.0;
    const auto curve = noisy_rabi_curve(tc, times, 1000, derive_seed(seed, 5));
    const auto fit = fit_rabi(curve, tc);
    sum.check("rabi_fit_nbar", fit.nbar, 14.0, 2.0);
    sum.check("rabi_fit_omega_hz", fit.rabi / kTwoPi, 2.60e6, 0.02e6, "Hz");
    const auto est = transfer_fidelity(tc, 1000, derive_seed(seed, 6), cfg.histogram);
    sum.check_range("transfer_probability", est.p_transfer, 0.97, 1.0);
  }

  json doc = {{"seed", seed}, {"tolerance_scale", tolerance_scale}, {"all_pass", sum.all_pass}, {"rows", sum.rows}};
  ctx.emit("reproduce_summary.json", doc.dump(2) + "\n");
  return sum.all_pass ? kOk : kChecksFailed;
}

}  // namespace ionstate::cli
