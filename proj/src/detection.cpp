#include "ionstate/detection.hpp"

#include <cmath>
#include <random>

#include "ionstate/errors.hpp"
#include "ionstate/rng.hpp"
#include "ionstate/special.hpp"

namespace ionstate {

namespace {

bool degenerate(const HistogramModel& m) { return m.nbar_bright == m.nbar_dark; }

}  // namespace

void HistogramModel::validate() const {
  const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!std::isfinite(nbar_dark) || nbar_dark < 0.0) throw DomainError("histogram model: nbar_dark must be >= 0");
  if (!std::isfinite(nbar_bright) || nbar_bright < nbar_dark)
    throw DomainError("histogram model: nbar_bright must be >= nbar_dark");
  if (!(tau_dark > 0.0) || !(tau_bright > 0.0)) throw DomainError("histogram model: pumping times must be > 0");
  if (!finite_pos(window)) throw DomainError("histogram model: window must be > 0");
}

double HistogramModel::beta_bright() const { return window / (tau_bright * (nbar_bright - nbar_dark)); }
double HistogramModel::beta_dark() const { return window / (tau_dark * (nbar_bright - nbar_dark)); }

int HistogramModel::n_max() const {
  const double mu = nbar_bright;
  int n = static_cast<int>(std::ceil(mu));
  // P(X > n) = P(n + 1, mu) for X ~ Poisson(mu).
  while (mu > 0.0 && reg_lower_gamma(n + 1, mu) >= 1e-12) n += 1 + n / 8;
  return std::max(n, 1);
}

const char* to_string(StateLabel label) { return label == StateLabel::Bright ? "bright" : "dark"; }

double bright_pmf(const HistogramModel& m, int n) {
  m.validate();
  if (n < 0) return 0.0;
  if (degenerate(m)) return poisson_pmf(m.nbar_bright, n);
  const double b = m.beta_bright();
  const double span = m.nbar_bright - m.nbar_dark;
  const double survive = std::exp(-b * span) * poisson_pmf(m.nbar_bright, n);
  const double log_pref = std::log(b) + b * m.nbar_dark - (n + 1.0) * std::log1p(b);
  const double bracket = reg_gamma_interval(n + 1, (1.0 + b) * m.nbar_dark, (1.0 + b) * m.nbar_bright);
  return survive + std::exp(log_pref) * bracket;
}

double dark_pmf(const HistogramModel& m, int n) {
  m.validate();
  if (n < 0) return 0.0;
  if (degenerate(m)) return poisson_pmf(m.nbar_dark, n);
  const double b = m.beta_dark();
  if (b >= 1.0) throw DomainError("dark_pmf: beta_dark >= 1, expression undefined");
  const double span = m.nbar_bright - m.nbar_dark;
  const double survive = std::exp(-b * span) * poisson_pmf(m.nbar_dark, n);
  const double log_pref = std::log(b) - b * m.nbar_bright - (n + 1.0) * std::log1p(-b);
  const double bracket = reg_gamma_interval(n + 1, (1.0 - b) * m.nbar_dark, (1.0 - b) * m.nbar_bright);
  return survive + std::exp(log_pref) * bracket;
}

double state_pmf(const HistogramModel& m, StateLabel state, int n) {
  return state == StateLabel::Bright ? bright_pmf(m, n) : dark_pmf(m, n);
}

std::vector<double> pmf_table(const HistogramModel& m, StateLabel state, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n_max, -1) + 1));
  for (int n = 0; n <= n_max; ++n) out[n] = state_pmf(m, state, n);
  return out;
}

int telegraph_sample(const HistogramModel& m, StateLabel initial, std::uint64_t seed) {
  m.validate();
  SplitMix64 rng(seed);
  const bool bright = initial == StateLabel::Bright;
  const double tau = bright ? m.tau_bright : m.tau_dark;
  const double rate_bright = m.nbar_bright / m.window;
  const double rate_dark = m.nbar_dark / m.window;
  const double r1 = bright ? rate_bright : rate_dark;
  const double r2 = bright ? rate_dark : rate_bright;
  const double jump = std::isfinite(tau) ? std::exponential_distribution<double>(1.0 / tau)(rng)
                                         : std::numeric_limits<double>::infinity();
  const double before = std::min(jump, m.window);
  const double mean = r1 * before + r2 * (m.window - before);
  if (mean <= 0.0) return 0;
  return static_cast<int>(std::poisson_distribution<long long>(mean)(rng));
}

CountHistogram telegraph_histogram(const HistogramModel& m, StateLabel initial, std::int64_t count,
                                   std::uint64_t seed) {
  if (count < 0) throw DomainError("telegraph_histogram: negative count");
  CountHistogram h;
  std::vector<std::int64_t> dense;
  for (std::int64_t i = 0; i < count; ++i) {
    const int n = telegraph_sample(m, initial, derive_seed(seed, static_cast<std::uint64_t>(i)));
    if (static_cast<std::size_t>(n) >= dense.size()) dense.resize(n + 1, 0);
    ++dense[n];
  }
  for (std::size_t n = 0; n < dense.size(); ++n) h.add(static_cast<int>(n), dense[n]);
  return h;
}

Threshold optimal_threshold(const HistogramModel& m) {
  m.validate();
  const int n_max = m.n_max();
  const auto pb = pmf_table(m, StateLabel::Bright, n_max);
  const auto pd = pmf_table(m, StateLabel::Dark, n_max);
  // Dark tail sums from the top so small errors are not lost to cancellation.
  std::vector<double> dark_tail(n_max + 2, 0.0);
  for (int n = n_max; n >= 0; --n) dark_tail[n] = dark_tail[n + 1] + pd[n];
  Threshold best;
  best.bright_error = pb[0];
  best.dark_error = dark_tail[1];
  double bright_below = pb[0];
  for (int nc = 2; nc <= n_max; ++nc) {
    bright_below += pb[nc - 1];
    Threshold t{nc, bright_below, dark_tail[nc]};
    // Differences at rounding level count as ties.
    if (t.mean_error() < best.mean_error() - 1e-14) best = t;
  }
  return best;
}

double detection_fidelity(const HistogramModel& m) { return 1.0 - optimal_threshold(m).mean_error(); }

Classification classify(int n, const HistogramModel& m) {
  const double pb = bright_pmf(m, n);
  const double pd = dark_pmf(m, n);
  const double total = pb + pd;
  if (!(total > 0.0)) {
    // Both underflow: far above the bright mean counts as bright, far below as dark.
    return {n > m.nbar_bright ? StateLabel::Bright : StateLabel::Dark, 0.5};
  }
  if (pb >= pd) return {StateLabel::Bright, pb / total};
  return {StateLabel::Dark, pd / total};
}

}  // namespace ionstate
