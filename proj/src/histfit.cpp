#include "ionstate/histfit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ionstate/errors.hpp"
#include "ionstate/optimize.hpp"

namespace ionstate {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Parameterization {
  double window;
  double tau_cap;

  HistogramModel model(std::span<const double> t) const {
    HistogramModel m;
    m.nbar_dark = std::exp(t[0]);
    m.nbar_bright = m.nbar_dark + std::exp(t[1]);
    m.tau_dark = std::min(std::exp(t[2]), tau_cap);
    m.tau_bright = std::min(std::exp(t[3]), tau_cap);
    m.window = window;
    return m;
  }
};

double negative_log_likelihood(const CountHistogram& bright, const CountHistogram& dark, const HistogramModel& m) {
  try {
    if (m.beta_dark() >= 1.0) return kInf;
    const double ll = log_likelihood(bright, m, StateLabel::Bright) + log_likelihood(dark, m, StateLabel::Dark);
    return std::isfinite(ll) ? -ll : kInf;
  } catch (const DomainError&) {
    return kInf;
  }
}

// Method-of-moments start: split the counts at the midpoint of the two means.
std::vector<double> starting_point(const CountHistogram& bright, const CountHistogram& dark, double window,
                                   double tau_cap) {
  const double cut = 0.5 * (bright.mean() + dark.mean());
  double dark_sum = 0.0, dark_n = 0.0, dark_above = 0.0;
  for (const auto& [n, c] : dark.bins) {
    if (n < cut) {
      dark_sum += static_cast<double>(n) * c;
      dark_n += c;
    } else {
      dark_above += c;
    }
  }
  double bright_sum = 0.0, bright_n = 0.0, bright_below = 0.0;
  for (const auto& [n, c] : bright.bins) {
    if (n >= cut) {
      bright_sum += static_cast<double>(n) * c;
      bright_n += c;
    } else {
      bright_below += c;
    }
  }
  const double nd = std::max(dark_n > 0 ? dark_sum / dark_n : dark.mean(), 1e-3);
  const double nb = std::max(bright_n > 0 ? bright_sum / bright_n : bright.mean(), nd + 1e-3);
  const auto tau_guess = [&](double frac) {
    const double t = frac > 0.0 ? 0.5 * window / frac : tau_cap;
    return std::clamp(t, 0.1 * window, 0.5 * tau_cap);
  };
  return {std::log(nd), std::log(nb - nd), std::log(tau_guess(dark_above / dark.total())),
          std::log(tau_guess(bright_below / bright.total()))};
}

}  // namespace

double log_likelihood(const CountHistogram& h, const HistogramModel& m, StateLabel state) {
  double ll = 0.0;
  for (const auto& [n, c] : h.bins) {
    if (c == 0) continue;
    const double p = state_pmf(m, state, n);
    if (!(p > 0.0)) return -kInf;
    ll += static_cast<double>(c) * std::log(p);
  }
  return ll;
}

ChiSquare pearson_chi2(const CountHistogram& h, const HistogramModel& m, StateLabel state, double min_expected) {
  const double total = static_cast<double>(h.total());
  const int top = std::max(h.max_count(), m.n_max());
  std::vector<double> observed, expected;
  double obs = 0.0, exp = 0.0, assigned = 0.0;
  for (int n = 0; n <= top; ++n) {
    const auto it = h.bins.find(n);
    obs += it == h.bins.end() ? 0.0 : static_cast<double>(it->second);
    const double e = total * state_pmf(m, state, n);
    exp += e;
    assigned += e;
    if (exp >= min_expected && total - assigned >= min_expected) {
      observed.push_back(obs);
      expected.push_back(exp);
      obs = exp = 0.0;
    }
  }
  // Remaining counts and the whole expected tail form the last group.
  exp += std::max(total - assigned, 0.0);
  if (observed.empty() || exp >= min_expected) {
    observed.push_back(obs);
    expected.push_back(exp);
  } else {
    observed.back() += obs;
    expected.back() += exp;
  }
  ChiSquare out;
  out.groups = static_cast<int>(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] > 0.0) out.chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  return out;
}

FitResult fit_histograms(const CountHistogram& bright, const CountHistogram& dark, double window,
                         const FitOptions& options) {
  bright.validate();
  dark.validate();
  if (!(window > 0.0)) throw DomainError("fit_histograms: window must be > 0");
  if (bright.total() < 100 || dark.total() < 100)
    throw DomainError("fit_histograms: need at least 100 events per histogram");

  const Parameterization par{window, options.tau_bound_factor * window};
  const optimize::Objective objective = [&](std::span<const double> t) {
    return negative_log_likelihood(bright, dark, par.model(t));
  };

  optimize::NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.x_tolerance = 1e-9;
  nm.f_tolerance = 1e-10;
  nm.initial_step = 0.3;
  auto best = optimize::nelder_mead(objective, starting_point(bright, dark, window, par.tau_cap), nm);
  int evaluations = best.evaluations;
  const std::vector<double> radius(4, 0.05);
  best = optimize::coordinate_polish(objective, best, radius, 3);
  nm.initial_step = 0.05;
  auto again = optimize::nelder_mead(objective, best.x, nm);
  evaluations += best.evaluations + again.evaluations;
  if (again.value <= best.value) best = again;

  FitResult r;
  r.model = par.model(best.x);
  r.evaluations = evaluations;
  r.converged = again.converged && std::isfinite(best.value);
  r.log_likelihood = -best.value;
  r.tau_dark_at_bound = std::exp(best.x[2]) >= par.tau_cap;
  r.tau_bright_at_bound = std::exp(best.x[3]) >= par.tau_cap;
  if (!r.converged) {
    r.diagnostic = std::isfinite(best.value) ? "simplex did not converge within the evaluation cap"
                                             : "likelihood not finite at any visited point";
    r.half_widths.fill(std::numeric_limits<double>::quiet_NaN());
    r.chi2_reduced = std::numeric_limits<double>::quiet_NaN();
    return r;
  }

  // Curvature of -log L in the natural parameters, restricted to the free ones.
  const HistogramModel& m = r.model;
  const std::array<double, 4> natural{m.nbar_dark, m.nbar_bright, m.tau_dark, m.tau_bright};
  const std::array<bool, 4> free{true, true, !r.tau_dark_at_bound, !r.tau_bright_at_bound};
  std::vector<int> idx;
  for (int i = 0; i < 4; ++i)
    if (free[i]) idx.push_back(i);
  const optimize::Objective natural_objective = [&](std::span<const double> p) {
    auto full = natural;
    for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = p[k];
    if (full[0] < 0.0 || full[1] < full[0] || full[2] <= 0.0 || full[3] <= 0.0) return kInf;
    const HistogramModel trial{full[0], full[1], full[2], full[3], window};
    return negative_log_likelihood(bright, dark, trial);
  };
  std::vector<double> x0, steps;
  for (int i : idx) {
    x0.push_back(natural[i]);
    steps.push_back(1e-3 * std::max(natural[i], i < 2 ? 1e-2 : 1e-3 * window));
  }
  const Eigen::MatrixXd hess = optimize::hessian(natural_objective, x0, steps);
  Eigen::LLT<Eigen::MatrixXd> llt(hess);
  r.half_widths.fill(kInf);
  if (llt.info() != Eigen::Success || !hess.allFinite()) {
    r.diagnostic = "likelihood curvature not positive definite; intervals unavailable";
    for (int i : idx) r.half_widths[i] = std::numeric_limits<double>::quiet_NaN();
  } else {
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
    for (std::size_t k = 0; k < idx.size(); ++k) r.half_widths[idx[k]] = options.z_score * std::sqrt(cov(k, k));
  }

  const auto cb = pearson_chi2(bright, m, StateLabel::Bright, options.min_expected);
  const auto cd = pearson_chi2(dark, m, StateLabel::Dark, options.min_expected);
  r.chi2 = cb.chi2 + cd.chi2;
  r.dof = cb.groups + cd.groups - 2 - static_cast<int>(idx.size());
  r.chi2_reduced = r.dof > 0 ? r.chi2 / r.dof : std::numeric_limits<double>::quiet_NaN();
  return r;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

}  // namespace

json to_json(const HistogramModel& m) {
  return {{"nbar_dark", m.nbar_dark},
          {"nbar_bright", m.nbar_bright},
          {"tau_dark_s", number_or_null(m.tau_dark)},
          {"tau_bright_s", number_or_null(m.tau_bright)},
          {"window_s", m.window}};
}

HistogramModel histogram_model_from_json(const json& doc) {
  try {
    HistogramModel m;
    m.nbar_dark = doc.at("nbar_dark").get<double>();
    m.nbar_bright = doc.at("nbar_bright").get<double>();
    m.tau_dark = doc.contains("tau_dark_s") ? number_or_inf(doc.at("tau_dark_s")) : kInf;
    m.tau_bright = doc.contains("tau_bright_s") ? number_or_inf(doc.at("tau_bright_s")) : kInf;
    m.window = doc.value("window_s", 1e-3);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("histogram model JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("histogram model JSON: ") + e.what());
  }
}

json to_json(const FitResult& r) {
  json doc = to_json(r.model);
  doc["half_widths"] = {{"nbar_dark", number_or_null(r.half_widths[0])},
                        {"nbar_bright", number_or_null(r.half_widths[1])},
                        {"tau_dark_s", number_or_null(r.half_widths[2])},
                        {"tau_bright_s", number_or_null(r.half_widths[3])}};
  doc["confidence"] = 0.99;
  doc["chi2"] = r.chi2;
  doc["dof"] = r.dof;
  doc["chi2_reduced"] = number_or_null(r.chi2_reduced);
  doc["log_likelihood"] = r.log_likelihood;
  doc["evaluations"] = r.evaluations;
  doc["converged"] = r.converged;
  doc["tau_dark_at_bound"] = r.tau_dark_at_bound;
  doc["tau_bright_at_bound"] = r.tau_bright_at_bound;
  if (!r.diagnostic.empty()) doc["diagnostic"] = r.diagnostic;
  return doc;
}

FitResult fit_result_from_json(const json& doc) {
  FitResult r;
  r.model = histogram_model_from_json(doc);
  try {
    const auto& hw = doc.at("half_widths");
    const char* keys[] = {"nbar_dark", "nbar_bright", "tau_dark_s", "tau_bright_s"};
    for (int i = 0; i < 4; ++i) r.half_widths[i] = number_or_inf(hw.at(keys[i]));
    r.chi2 = doc.at("chi2").get<double>();
    r.dof = doc.at("dof").get<int>();
    r.chi2_reduced = doc.at("chi2_reduced").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : doc.at("chi2_reduced").get<double>();
    r.log_likelihood = doc.at("log_likelihood").get<double>();
    r.evaluations = doc.value("evaluations", 0);
    r.converged = doc.at("converged").get<bool>();
    r.tau_dark_at_bound = doc.value("tau_dark_at_bound", false);
    r.tau_bright_at_bound = doc.value("tau_bright_at_bound", false);
    r.diagnostic = doc.value("diagnostic", std::string());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("fit result JSON: ") + e.what());
  }
  return r;
}

}  // namespace ionstate
