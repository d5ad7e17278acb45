#include "cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ionstate/csv.hpp"
#include "ionstate/errors.hpp"
#include "ionstate/histfit.hpp"
#include "ionstate/pumping_json.hpp"

namespace ionstate::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using constants::kTwoPi;
using csv::format_double;

void Context::emit(const std::string& name, const std::string& content) const {
  if (!config.output_dir) {
    out << content;
    out.flush();
    return;
  }
  const fs::path dir(*config.output_dir);
  fs::create_directories(dir);
  const fs::path final_path = dir / name;
  fs::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, final_path);
  err << "wrote " << final_path.string() << '\n';
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

PrepVariant parse_variant(const std::string& v) {
  if (v == "dark") return PrepVariant::Dark;
  if (v == "bright") return PrepVariant::Bright;
  throw ValidationError("variant must be 'dark' or 'bright', got '" + v + "'");
}

std::vector<Sublevel> d32_states(const AtomModel& atom, HalfInt F) {
  std::vector<Sublevel> out;
  for (const auto& s : atom.sublevels())
    if (s.level == LevelLabel::D32 && s.F == F) out.push_back(s);
  return out;
}

std::vector<Sublevel> complement(const AtomModel& atom, const std::vector<Sublevel>& excluded) {
  std::vector<Sublevel> out;
  for (const auto& s : ground_states(atom)) {
    if (std::find(excluded.begin(), excluded.end(), s) == excluded.end()) out.push_back(s);
  }
  return out;
}

}  // namespace

int cmd_atom_dump(const Context& ctx) {
  const auto atom = ctx.config.atom();
  std::ostringstream os;
  os << "level,F,mF,energy_GHz,gF\n";
  for (const auto& s : atom.sublevels()) {
    os << to_string(s.level) << ',' << s.F.str() << ',' << s.m.str() << ',' << format_double(atom.energy(s) / kTwoPi / 1e9)
       << ',' << format_double(atom.lande_gF(s)) << '\n';
  }
  ctx.emit("sublevels.csv", os.str());
  return kOk;
}

DetectionSetup apply_selection(DetectionSetup setup, const BeamSelection& sel) {
  for (const auto& name : sel.enable) setup = presets::with_beam(std::move(setup), name, true);
  for (const auto& name : sel.disable) setup = presets::with_beam(std::move(setup), name, false);
  if (sel.no_raman) setup = presets::without_raman(std::move(setup));
  if (sel.resonant_only) setup = presets::with_resonant_only(std::move(setup));
  if (sel.extinction_db) setup = presets::with_pi_extinction(std::move(setup), *sel.extinction_db);
  return setup;
}

int cmd_pump_dark_states(const Context& ctx, const BeamSelection& sel, double threshold) {
  const auto setup = apply_selection(ctx.config.detection_setup(), sel);
  const auto R = detection_rate_matrix(setup);
  std::ostringstream os;
  os << "state,outflow_per_s\n";
  for (const auto& s : find_dark_states(R, threshold))
    os << s.str() << ',' << format_double(R.outflow(R.require_index(s))) << '\n';
  ctx.emit("dark_states.csv", os.str());
  return kOk;
}

Timescales compute_timescales(const DetectionSetup& setup, double extinction_db) {
  const auto& atom = setup.atom;
  const auto R = detection_rate_matrix(setup);
  Timescales t;
  // Clearing of |F''=3, m<3>: first passage out of those states from |3,2>.
  std::vector<Sublevel> f3_low;
  for (const auto& s : d32_states(atom, 3))
    if (s.m < s.F) f3_low.push_back(s);
  if (!f3_low.empty()) t.clear_f3_low = depump_timescale(R, Sublevel{LevelLabel::D32, 3, 2}, complement(atom, f3_low));

  const Sublevel dark{LevelLabel::D32, 3, 3};
  const auto R_leaky = detection_rate_matrix(presets::with_pi_extinction(setup, extinction_db));
  t.extinction_db = extinction_db;
  t.dark_depump = depump_timescale(R_leaky, dark, complement(atom, d32_states(atom, 3)));
  t.dark_outflow = R_leaky.outflow(R_leaky.require_index(dark));
  if (!setup.raman_pairs.empty()) {
    const auto& pair = setup.raman_pairs.front();
    t.raman_max = raman_max_in_manifold(setup, pair) / kTwoPi;
    t.raman_min = raman_min_in_manifold(setup, pair) / kTwoPi;
    t.raman_via_p32 = raman_via_p32_estimate(setup, pair) / kTwoPi;
  }
  for (const auto& s : ground_states(atom)) t.p32_scattering_max = std::max(t.p32_scattering_max, p32_scattering_estimate(setup, s));
  return t;
}

int cmd_pump_timescales(const Context& ctx, const BeamSelection& sel, double extinction_db) {
  const auto t = compute_timescales(apply_selection(ctx.config.detection_setup(), sel), extinction_db);
  std::ostringstream os;
  os << "quantity,value,unit\n";
  const auto row = [&](const char* name, double v, const char* unit) {
    os << name << ',' << format_double(v) << ',' << unit << '\n';
  };
  row("clear_f3_low", t.clear_f3_low, "s");
  row("extinction", t.extinction_db, "dB");
  row("dark_depump", t.dark_depump, "s");
  row("dark_outflow", t.dark_outflow, "1/s");
  row("raman_max_in_manifold", t.raman_max, "Hz");
  row("raman_min_in_manifold", t.raman_min, "Hz");
  row("raman_via_p32", t.raman_via_p32, "Hz");
  row("p32_scattering_max", t.p32_scattering_max, "1/s");
  ctx.emit("timescales.csv", os.str());
  return kOk;
}

int cmd_pump_evolve(const Context& ctx, const std::string& variant, double duration) {
  if (!(duration >= 0.0)) throw ValidationError("duration must be >= 0");
  const auto setup = ctx.config.detection_setup();
  const auto p = optical_pump_prepare(setup, parse_variant(variant), duration);
  const auto states = ground_states(setup.atom);
  std::ostringstream os;
  os << "state,population\n";
  for (std::size_t i = 0; i < states.size(); ++i) os << states[i].str() << ',' << format_double(p(static_cast<Eigen::Index>(i))) << '\n';
  ctx.emit("populations_" + variant + ".csv", os.str());
  return kOk;
}

int cmd_detect(const Context& ctx, std::int64_t events, const std::string& variant, double prep_duration,
               const BeamSelection& sel) {
  if (events < 1) throw ValidationError("events must be >= 1");
  const auto setup = apply_selection(ctx.config.detection_setup(), sel);
  const auto p0 = optical_pump_prepare(setup, parse_variant(variant), prep_duration);
  const DetectionSampler sampler(setup);
  const auto h = sampler.sample_batch(p0, events, ctx.config.seed);
  std::ostringstream os;
  csv::write_histogram(os, h);
  ctx.emit("histogram_" + variant + ".csv", os.str());
  return kOk;
}

int cmd_fit(const Context& ctx, const std::string& bright, const std::string& dark, double window) {
  const auto hb = csv::read_histogram_file(bright);
  const auto hd = csv::read_histogram_file(dark);
  const auto r = fit_histograms(hb, hd, window);
  json doc = to_json(r);
  if (r.converged) doc["fidelity"] = detection_fidelity(r.model);
  ctx.emit("fit.json", dump(doc));
  if (!r.converged) {
    ctx.err << "fit failed: " << r.diagnostic << '\n';
    return kNumerical;
  }
  return kOk;
}

HistogramModel resolve_model(const Context& ctx, const ModelSource& src) {
  if (src.file && !src.params.empty()) throw ValidationError("give either --model or --params, not both");
  if (src.file) {
    std::ifstream in(*src.file);
    if (!in) throw ValidationError("cannot open '" + *src.file + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("model '" + *src.file + "': " + e.what());
    }
    return histogram_model_from_json(doc);
  }
  if (!src.params.empty()) {
    if (src.params.size() != 4 && src.params.size() != 5)
      throw ValidationError("--params takes nbar_dark,nbar_bright,tau_dark,tau_bright[,window]");
    HistogramModel m{src.params[0], src.params[1], src.params[2], src.params[3],
                     src.params.size() == 5 ? src.params[4] : ctx.config.histogram.window};
    try {
      m.validate();
    } catch (const DomainError& e) {
      throw ValidationError(e.what());
    }
    return m;
  }
  return ctx.config.histogram;
}

int cmd_fidelity(const Context& ctx, const ModelSource& src) {
  const auto m = resolve_model(ctx, src);
  const auto t = optimal_threshold(m);
  json doc = {{"model", to_json(m)},
              {"fidelity", 1.0 - t.mean_error()},
              {"threshold", t.n_c},
              {"bright_error", t.bright_error},
              {"dark_error", t.dark_error},
              {"p_bright_zero", bright_pmf(m, 0)}};
  ctx.emit("fidelity.json", dump(doc));
  return kOk;
}

int cmd_pmf(const Context& ctx, const ModelSource& src, std::optional<int> max_n) {
  const auto m = resolve_model(ctx, src);
  const int n_max = max_n.value_or(m.n_max());
  if (n_max < 0) throw ValidationError("--max-n must be >= 0");
  std::ostringstream os;
  os << "n,p_bright,p_dark\n";
  for (int n = 0; n <= n_max; ++n)
    os << n << ',' << format_double(bright_pmf(m, n)) << ',' << format_double(dark_pmf(m, n)) << '\n';
  ctx.emit("pmf.csv", os.str());
  return kOk;
}

namespace {

std::vector<double> time_grid(int points, double t_max) {
  if (points < 2) throw ValidationError("--points must be >= 2");
  if (!(t_max > 0.0)) throw ValidationError("--t-max must be > 0");
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = t_max * i / (points - 1);
  return t;
}

}  // namespace

int cmd_rabi_curve(const Context& ctx, int points, double t_max, int shots) {
  const auto times = time_grid(points, t_max);
  const auto& cfg = ctx.config.transfer;
  const auto curve = shots > 0 ? noisy_rabi_curve(cfg, times, shots, ctx.config.seed) : sample_rabi_curve(cfg, times);
  std::ostringstream os;
  os << "t_ns,p_bright\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    os << format_double(curve.t[i] * 1e9) << ',' << format_double(curve.p_bright[i]) << '\n';
  ctx.emit("rabi_curve.csv", os.str());
  return kOk;
}

int cmd_rabi_fit(const Context& ctx, const std::string& data, bool float_eta) {
  const auto table = csv::read_table_file(data);
  RabiCurve curve;
  const auto ct = table.column("t_ns");
  const auto cp = table.column("p_bright");
  std::optional<std::size_t> cs;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == "sigma") cs = i;
  for (const auto& row : table.rows) {
    curve.t.push_back(row[ct] * 1e-9);
    curve.p_bright.push_back(row[cp]);
    if (cs) curve.sigma.push_back(row[*cs]);
  }
  RabiFitOptions opt;
  opt.float_eta = float_eta;
  const auto fit = fit_rabi(curve, ctx.config.transfer, opt);
  json doc = {{"nbar", fit.nbar},
              {"nbar_sigma", fit.nbar_sigma},
              {"omega_hz", fit.rabi / kTwoPi},
              {"omega_sigma", fit.rabi_sigma / kTwoPi},
              {"eta", fit.eta},
              {"chi2", fit.chi2},
              {"dof", fit.dof},
              {"converged", fit.converged}};
  if (float_eta) doc["eta_sigma"] = fit.eta_sigma;
  if (!fit.diagnostic.empty()) doc["diagnostic"] = fit.diagnostic;
  ctx.emit("rabi_fit.json", dump(doc));
  if (!fit.converged) {
    ctx.err << "Rabi fit failed: " << fit.diagnostic << '\n';
    return kNumerical;
  }
  return kOk;
}

int cmd_rabi_fidelity(const Context& ctx, int shots) {
  if (shots < 1) throw ValidationError("--shots must be >= 1");
  const auto est = transfer_fidelity(ctx.config.transfer, shots, ctx.config.seed, ctx.config.histogram);
  json doc = {{"p_transfer", est.p_transfer},
              {"sigma", est.sigma},
              {"t_pi_ns", est.t_pi * 1e9},
              {"p_bright_model", est.p_bright},
              {"raw_dark_fraction", est.raw_dark_fraction},
              {"shots", shots}};
  ctx.emit("rabi_fidelity.json", dump(doc));
  return kOk;
}

}  // namespace ionstate::cli
