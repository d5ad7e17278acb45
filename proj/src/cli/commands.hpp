#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace ionstate::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kUnsupported = 3, kNumerical = 4, kChecksFailed = 1 };

struct Context {
  ExperimentConfig config;
  std::ostream& out;
  std::ostream& err;

  /// Writes `content` to <out dir>/<name> via a temporary file and rename, or
  /// to `out` when no output directory is set.
  void emit(const std::string& name, const std::string& content) const;
};

int cmd_atom_dump(const Context& ctx);

struct BeamSelection {
  bool no_raman = false;
  bool resonant_only = false;
  std::vector<std::string> enable;
  std::vector<std::string> disable;
  std::optional<double> extinction_db;
};
DetectionSetup apply_selection(DetectionSetup setup, const BeamSelection& sel);

struct Timescales {
  double clear_f3_low = std::numeric_limits<double>::quiet_NaN();  // s
  double extinction_db = 0.0;
  double dark_depump = 0.0;   // s, first passage out of F''=3 from |3,3>
  double dark_outflow = 0.0;  // 1/s
  double raman_max = 0.0;     // Hz
  double raman_min = 0.0;
  double raman_via_p32 = 0.0;
  double p32_scattering_max = 0.0;  // 1/s
};
Timescales compute_timescales(const DetectionSetup& setup, double extinction_db);

int cmd_pump_dark_states(const Context& ctx, const BeamSelection& sel, double threshold);
int cmd_pump_timescales(const Context& ctx, const BeamSelection& sel, double extinction_db);
int cmd_pump_evolve(const Context& ctx, const std::string& variant, double duration);

int cmd_detect(const Context& ctx, std::int64_t events, const std::string& variant, double prep_duration,
               const BeamSelection& sel);

int cmd_fit(const Context& ctx, const std::string& bright, const std::string& dark, double window);

struct ModelSource {
  std::optional<std::string> file;
  std::vector<double> params;  // nbar_dark, nbar_bright, tau_dark, tau_bright, window
};
HistogramModel resolve_model(const Context& ctx, const ModelSource& src);
int cmd_fidelity(const Context& ctx, const ModelSource& src);
int cmd_pmf(const Context& ctx, const ModelSource& src, std::optional<int> max_n);

int cmd_rabi_curve(const Context& ctx, int points, double t_max, int shots);
int cmd_rabi_fit(const Context& ctx, const std::string& data, bool float_eta);
int cmd_rabi_fidelity(const Context& ctx, int shots);

int cmd_reproduce(const Context& ctx, double tolerance_scale);

}  // namespace ionstate::cli
