// Acceptance runner: one PASS/FAIL line per criterion, with wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "ionstate/angular.hpp"
#include "ionstate/detection.hpp"
#include "ionstate/histfit.hpp"
#include "ionstate/presets.hpp"
#include "ionstate/pumping.hpp"
#include "ionstate/raman_transfer.hpp"
#include "ionstate/rng.hpp"

#include "cli/commands.hpp"

using namespace ionstate;
using constants::kTwoPi;

namespace {

const HistogramModel kReference{0.44, 8.7, 5.8e-3, 3.4e-3, 1e-3};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // s
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

HistogramModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HistogramModel m;
  m.window = 1e-3;
  m.nbar_dark = 0.02 + 1.5 * u(rng);
  m.nbar_bright = m.nbar_dark + 1.0 + 20.0 * u(rng);
  m.tau_bright = m.window * std::pow(10.0, -0.5 + 2.5 * u(rng));
  const double tau_d_min = 1.05 * m.window / (m.nbar_bright - m.nbar_dark);
  m.tau_dark = std::max(tau_d_min, m.window * std::pow(10.0, -0.5 + 2.5 * u(rng)));
  return m;
}

double total_variation(const HistogramModel& m, StateLabel st, const CountHistogram& h) {
  const int top = std::max(m.n_max(), h.max_count()) + 5;
  const double N = static_cast<double>(h.total());
  double tv = 0.0;
  for (int n = 0; n <= top; ++n) {
    const auto it = h.bins.find(n);
    tv += std::abs((it == h.bins.end() ? 0.0 : it->second / N) - state_pmf(m, st, n));
  }
  return 0.5 * tv;
}

std::set<std::string> dark_names(const DetectionSetup& s) {
  std::set<std::string> out;
  for (const auto& d : find_dark_states(detection_rate_matrix(s))) out.insert(d.str());
  return out;
}

std::string join(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? " " : "") + x;
  return out + "}";
}

Outcome zero_count() {
  const double p = bright_pmf(kReference, 0);
  return {within(p, 0.023, 0.002), fmt("P_b(0) = %.6f (target 0.023 +- 0.002)", p)};
}

Outcome fidelity() {
  const auto t = optimal_threshold(kReference);
  const double f = detection_fidelity(kReference);
  return {within(f, 0.896, 0.010), fmt("fidelity = %.5f at n_c = %d (target 0.896 +- 0.010)", f, t.n_c)};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  auto run = [&](const HistogramModel& m, std::uint64_t seed) {
    for (auto st : {StateLabel::Bright, StateLabel::Dark}) {
      const auto h = telegraph_histogram(m, st, 1'000'000, derive_seed(seed, st == StateLabel::Bright ? 0 : 1));
      worst = std::max(worst, total_variation(m, st, h));
    }
  };
  run(kReference, 1);
  std::mt19937_64 rng(2008);
  for (int i = 0; i < 20; ++i) run(random_model(rng), 100 + i);
  return {worst < 0.005, fmt("max total variation over 21 models x 2 states = %.5f (limit 0.005)", worst)};
}

Outcome fit_round_trip() {
  const std::uint64_t seed = 20080414;
  const auto hb = telegraph_histogram(kReference, StateLabel::Bright, 10000, derive_seed(seed, 0));
  const auto hd = telegraph_histogram(kReference, StateLabel::Dark, 10000, derive_seed(seed, 1));
  const auto r = fit_histograms(hb, hd, kReference.window);
  const auto& m = r.model;
  const bool ok = r.converged && within(m.nbar_dark, 0.44, 0.06) && within(m.nbar_bright, 8.7, 0.3) &&
                  within(m.tau_dark, 5.8e-3, 1.2e-3) && within(m.tau_bright, 3.4e-3, 0.6e-3) &&
                  r.chi2_reduced >= 0.7 && r.chi2_reduced <= 1.3;
  return {ok, fmt("nbar_d %.4f nbar_b %.3f tau_d %.3f ms tau_b %.3f ms chi2_red %.3f (dof %d)", m.nbar_dark,
                  m.nbar_bright, m.tau_dark * 1e3, m.tau_bright * 1e3, r.chi2_reduced, r.dof)};
}

Outcome dark_structure() {
  const auto setup = presets::detection_setup();
  std::set<std::string> unwanted;
  for (const auto& s : setup.atom.sublevels()) {
    if (s.level != LevelLabel::D32) continue;
    if ((s.F == HalfInt(1) && s.m == HalfInt(0)) || (s.F == HalfInt(2) && abs(s.m) == HalfInt(2)) || s.F == HalfInt(3))
      unwanted.insert(s.str());
  }
  // Without the Raman pair: the resonant pi-repumper picture, off-resonant couplings suppressed.
  const auto without = dark_names(presets::with_resonant_only(presets::without_raman(setup)));
  const auto full = dark_names(setup);
  const std::set<std::string> expect_full{Sublevel{LevelLabel::D32, 3, 3}.str()};
  return {without == unwanted && full == expect_full,
          "without Raman " + join(without) + "; full " + join(full)};
}

Outcome branching() {
  const auto atom = build_ba137();
  const double b = atom.branching_ratio(Sublevel{LevelLabel::P12, 2, 2}, Sublevel{LevelLabel::D32, 3, 3});
  return {within(b, 0.125, 0.025), fmt("branching = %.5f (target 1/8 +- 20%%)", b)};
}

Outcome structure() {
  const auto atom = build_ba137();
  const double d5 = std::abs(atom.transition_hz(LevelLabel::D32, 0, LevelLabel::P12, 1) -
                             atom.transition_hz(LevelLabel::D32, 3, LevelLabel::P12, 2));
  const double s = std::abs(atom.hyperfine_interval_hz(LevelLabel::S12, 2, 1));
  const double p = std::abs(atom.hyperfine_interval_hz(LevelLabel::P12, 2, 1));
  const auto& d = atom.level(LevelLabel::D32);
  double spread = 0.0;
  for (auto F : d.allowed_F())
    if (F.twice() > 0) spread = std::max(spread, std::abs(lande_gF(d, F) - lande_gF(d, d.allowed_F().back())));
  const bool ok = within(d5, 394e6, 10e6) && within(s, 8.036e9, 1e6) && within(p, 1.488e9, 5e6) && spread <= 1e-12;
  return {ok, fmt("D5 %.2f MHz, S1/2 %.4f GHz, P1/2 %.4f GHz, g_F spread %.1e", d5 / 1e6, s / 1e9, p / 1e9, spread)};
}

Outcome lamb_dicke_check() {
  const auto cfg = default_transfer_config();
  const double eta = lamb_dicke(cfg), ratio = doppler_limit(cfg) / 14.0;
  return {within(eta, 0.044, 0.001) && ratio >= 5.0 && ratio <= 10.0,
          fmt("eta = %.5f, Doppler limit / 14 = %.3f", eta, ratio)};
}

Outcome rabi_round_trip() {
  const auto cfg = default_transfer_config();
  std::vector<double> times(25);
  for (int i = 0; i < 25; ++i) times[i] = 1e-6 * i / 24.0;
  const auto f = fit_rabi(noisy_rabi_curve(cfg, times, 1000, 20080414), cfg);
  const auto mn = first_minimum(cfg);
  const bool ok = f.converged && within(f.nbar, 14.0, 2.0) && within(f.rabi / kTwoPi, 2.60e6, 0.02e6) &&
                  mn.t >= 180e-9 && mn.t <= 220e-9 && mn.p_bright <= 0.03;
  return {ok, fmt("nbar %.2f, Omega 2pi x %.4f MHz, minimum %.1f ns at P_bright %.4f", f.nbar, f.rabi / kTwoPi / 1e6,
                  mn.t * 1e9, mn.p_bright)};
}

Outcome calibrated_scales() {
  const auto t = cli::compute_timescales(presets::detection_setup(), 30.0);
  const double ratio = t.raman_max / t.raman_via_p32;
  const bool ok = t.clear_f3_low >= 10e-6 && t.clear_f3_low <= 100e-6 && t.dark_depump >= 10e-3 &&
                  t.dark_depump <= 60e-3 && t.raman_via_p32 < 5e3 && ratio > 100.0;
  return {ok, fmt("clearing %.1f us, 30 dB depump %.2f ms, via P3/2 %.0f Hz, in-manifold %.0f Hz (ratio %.0f; "
                  "smallest in-manifold pair %.0f Hz)",
                  t.clear_f3_low * 1e6, t.dark_depump * 1e3, t.raman_via_p32, t.raman_max, ratio, t.raman_min)};
}

Outcome invariant_suites() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double pmf_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_model(rng);
    for (auto st : {StateLabel::Bright, StateLabel::Dark}) {
      double s = 0.0;
      for (double p : pmf_table(m, st, m.n_max())) s += p;
      pmf_err = std::max(pmf_err, std::abs(s - 1.0));
    }
  }

  double col_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto setup = presets::detection_setup();
    for (auto& b : setup.beams) {
      b.rabi = kTwoPi * (1e6 + 5e7 * u(rng));
      b.detuning = kTwoPi * (u(rng) - 0.5) * 2e8;
      b.extinction_db = 10.0 + 30.0 * u(rng);
      b.enabled = u(rng) < 0.8;
    }
    setup.atom = setup.atom.with_field(1e-5 + 1e-3 * u(rng));
    const auto R = detection_rate_matrix(setup);
    const double scale = std::max(1.0, R.rates.cwiseAbs().maxCoeff());
    col_err = std::max(col_err, R.rates.colwise().sum().cwiseAbs().maxCoeff() / scale);
  }

  double sym_err = 0.0;
  long symbols = 0;
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b)
      for (int c = std::abs(a - b); c <= std::min(a + b, 10); c += 2)
        for (int ma = -a; ma <= a; ma += 2)
          for (int mb = -b; mb <= b; mb += 2) {
            const int mc = -ma - mb;
            if (std::abs(mc) > c) continue;
            const double v = wigner3j(HalfInt::from_twice(a), HalfInt::from_twice(b), HalfInt::from_twice(c),
                                      HalfInt::from_twice(ma), HalfInt::from_twice(mb), HalfInt::from_twice(mc));
            sym_err = std::max(sym_err, std::abs(v - oracle::wigner3j(a, b, c, ma, mb, mc)));
            ++symbols;
          }
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b)
      for (int c = std::abs(a - b); c <= std::min(a + b, 10); c += 2)
        for (int d = 0; d <= 10; ++d)
          for (int e = 0; e <= 10; ++e) {
            if (!oracle::triad(d, e, c)) continue;
            for (int f = 0; f <= 10; ++f) {
              if (!oracle::triad(a, e, f) || !oracle::triad(d, b, f)) continue;
              const double v = wigner6j(HalfInt::from_twice(a), HalfInt::from_twice(b), HalfInt::from_twice(c),
                                        HalfInt::from_twice(d), HalfInt::from_twice(e), HalfInt::from_twice(f));
              sym_err = std::max(sym_err, std::abs(v - oracle::wigner6j(a, b, c, d, e, f)));
              ++symbols;
            }
          }

  double weight_err = 0.0;
  for (double nbar = 0.0; nbar <= 60.0; nbar += 0.37) {
    double s = 0.0;
    for (int n = 0; n <= thermal_cutoff(nbar); ++n) s += thermal_weight(nbar, n);
    weight_err = std::max(weight_err, std::abs(s - 1.0));
  }

  const bool ok = pmf_err < 1e-9 && col_err < 1e-9 && sym_err < 1e-12 && weight_err < 1e-10;
  return {ok, fmt("PMF %.1e, column sums %.1e, 3j/6j %.1e over %ld symbols, thermal weights %.1e", pmf_err, col_err,
                  sym_err, symbols, weight_err)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "zero-count bound", 1.0, zero_count},
      {2, "detection fidelity", 1.0, fidelity},
      {3, "oracle equivalence", 60.0, oracle_equivalence},
      {4, "fit round-trip", 120.0, fit_round_trip},
      {5, "dark-state structure", 5.0, dark_structure},
      {6, "branching", 1.0, branching},
      {7, "structure anchors", 1.0, structure},
      {8, "Lamb-Dicke", 1.0, lamb_dicke_check},
      {9, "Rabi round-trip", 60.0, rabi_round_trip},
      {10, "calibrated scales", 30.0, calibrated_scales},
      {11, "invariant suites", 120.0, invariant_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.time_limit;
    if (o.pass && !pass) o.detail += fmt(" [over the %.0f s limit]", c.time_limit);
    failed += !pass;
    std::printf("%s [%2d] %-22s %8.3f s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
