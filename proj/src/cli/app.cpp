#include "cli/app.hpp"

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cli/commands.hpp"
#include "ionstate/errors.hpp"

namespace ionstate::cli {

namespace {

void add_selection(CLI::App* cmd, BeamSelection& sel) {
  cmd->add_flag("--no-raman", sel.no_raman, "Drop the Raman pair");
  cmd->add_flag("--resonant-only", sel.resonant_only, "Ignore couplings detuned by more than 100 MHz");
  cmd->add_option("--enable", sel.enable, "Switch a beam on (e.g. D6)");
  cmd->add_option("--disable", sel.disable, "Switch a beam off");
}

void add_model(CLI::App* cmd, ModelSource& src) {
  cmd->add_option("--model", src.file, "Histogram model or fit result JSON");
  cmd->add_option("--params", src.params, "nbar_dark,nbar_bright,tau_dark_s,tau_bright_s[,window_s]")->delimiter(',');
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis tools for hyperfine-resolved state detection in 137Ba+"};
  app.name("ionstate");
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "Experiment configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for stochastic commands");
  app.add_option("--out", out_dir, "Write results into this directory instead of standard output");

  auto* atom = app.add_subcommand("atom", "Level structure");
  atom->require_subcommand(1);
  auto* atom_dump = atom->add_subcommand("dump", "Sublevel table as CSV");

  BeamSelection sel;
  double threshold = 10.0;
  double extinction_db = 30.0;
  std::string variant = "dark";
  double duration = 1e-3;
  auto* pump = app.add_subcommand("pump", "Optical pumping rate model");
  pump->require_subcommand(1);
  auto* dark_states = pump->add_subcommand("dark-states", "Sublevels with total outflow below a threshold");
  add_selection(dark_states, sel);
  dark_states->add_option("--threshold", threshold, "Outflow threshold in 1/s")->capture_default_str();
  auto* timescales = pump->add_subcommand("timescales", "Clearing, depumping and Raman rates");
  add_selection(timescales, sel);
  timescales->add_option("--extinction-db", extinction_db, "Polarization extinction of the pi beams for the depumping estimate")
      ->capture_default_str();
  auto* evolve = pump->add_subcommand("evolve", "Populations after optical pumping from a uniform start");
  evolve->add_option("--variant", variant, "dark or bright")->capture_default_str();
  evolve->add_option("--duration", duration, "Pumping time in s")->capture_default_str();

  std::int64_t events = 10000;
  auto* detect = app.add_subcommand("detect", "Simulated detection histogram");
  detect->add_option("--events", events, "Number of detection windows")->capture_default_str();
  detect->add_option("--variant", variant, "dark or bright")->capture_default_str();
  detect->add_option("--prep-duration", duration, "Optical pumping time before detection in s")->capture_default_str();
  add_selection(detect, sel);

  std::string bright_file, dark_file;
  double window = 1e-3;
  auto* fit = app.add_subcommand("fit", "Fit the telegraph model to bright and dark histograms");
  fit->add_option("--bright", bright_file, "Bright histogram CSV (n,count)")->required()->check(CLI::ExistingFile);
  fit->add_option("--dark", dark_file, "Dark histogram CSV (n,count)")->required()->check(CLI::ExistingFile);
  fit->add_option("--window", window, "Detection window in s")->capture_default_str();

  ModelSource model;
  auto* fidelity = app.add_subcommand("fidelity", "Optimal threshold and detection fidelity");
  add_model(fidelity, model);
  std::optional<int> max_n;
  auto* pmf = app.add_subcommand("pmf", "Bright and dark count distributions as CSV");
  add_model(pmf, model);
  pmf->add_option("--max-n", max_n, "Largest count");

  int points = 25, shots = 0;
  double t_max = 1e-6;
  bool float_eta = false;
  std::string data_file;
  auto* rabi = app.add_subcommand("rabi", "Raman transfer");
  rabi->require_subcommand(1);
  auto* curve = rabi->add_subcommand("curve", "Thermal Rabi curve as CSV (t_ns,p_bright)");
  curve->add_option("--points", points, "Number of time points")->capture_default_str();
  curve->add_option("--t-max", t_max, "Last time point in s")->capture_default_str();
  curve->add_option("--shots", shots, "Binomial shots per point, 0 for the exact curve")->capture_default_str();
  auto* rabi_fit = rabi->add_subcommand("fit", "Fit nbar and the Rabi rate to a curve");
  rabi_fit->add_option("--data", data_file, "CSV with t_ns,p_bright[,sigma]")->required()->check(CLI::ExistingFile);
  rabi_fit->add_flag("--float-eta", float_eta, "Fit the Lamb-Dicke parameter too");
  int fidelity_shots = 1000;
  auto* rabi_fid = rabi->add_subcommand("fidelity", "Simulated transfer probability at the first minimum");
  rabi_fid->add_option("--shots", fidelity_shots, "Detection events")->capture_default_str();

  double tolerance_scale = 1.0;
  auto* reproduce = app.add_subcommand("reproduce", "Run the full analysis and compare with reference values");
  reproduce->add_option("--tolerance-scale", tolerance_scale, "Multiplies every tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    ExperimentConfig config = config_path ? load_config(*config_path) : ExperimentConfig{};
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    const Context ctx{config, out, err};

    if (*atom_dump) return cmd_atom_dump(ctx);
    if (*dark_states) return cmd_pump_dark_states(ctx, sel, threshold);
    if (*timescales) return cmd_pump_timescales(ctx, sel, extinction_db);
    if (*evolve) return cmd_pump_evolve(ctx, variant, duration);
    if (*detect) return cmd_detect(ctx, events, variant, duration, sel);
    if (*fit) return cmd_fit(ctx, bright_file, dark_file, window);
    if (*fidelity) return cmd_fidelity(ctx, model);
    if (*pmf) return cmd_pmf(ctx, model, max_n);
    if (*curve) return cmd_rabi_curve(ctx, points, t_max, shots);
    if (*rabi_fit) return cmd_rabi_fit(ctx, data_file, float_eta);
    if (*rabi_fid) return cmd_rabi_fidelity(ctx, fidelity_shots);
    if (*reproduce) return cmd_reproduce(ctx, tolerance_scale);
    err << "no command given\n";
    return kUsage;
  } catch (const UnsupportedConfiguration& e) {
    err << "unsupported configuration: " << e.what() << '\n';
    return kUnsupported;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "file error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ionstate::cli
