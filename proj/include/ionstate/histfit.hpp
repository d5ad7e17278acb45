#pragma once

#include <array>
#include <string>

#include "json.hpp"

#include "ionstate/detection.hpp"
#include "ionstate/histogram.hpp"

namespace ionstate {

struct FitResult {
  HistogramModel model;
  /// 99 % half-widths for nbar_dark, nbar_bright, tau_dark, tau_bright.
  /// Infinite for a pumping time pinned at the upper bound.
  std::array<double, 4> half_widths{};
  double chi2 = 0.0;
  int dof = 0;
  double chi2_reduced = 0.0;
  double log_likelihood = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool tau_dark_at_bound = false;
  bool tau_bright_at_bound = false;
  std::string diagnostic;
};

struct FitOptions {
  int max_evaluations = 20000;
  /// Pumping times are capped at this multiple of the window.
  double tau_bound_factor = 1e4;
  double min_expected = 5.0;
  double z_score = 2.5758293035489;  // two-sided 99 %
};

/// Joint multinomial maximum likelihood over both histograms with shared parameters.
/// Throws DomainError on empty input or fewer than 100 events per histogram.
FitResult fit_histograms(const CountHistogram& bright, const CountHistogram& dark, double window,
                         const FitOptions& options = {});

/// Pearson chi-square of one histogram against one state's PMF. Low-expectation
/// bins are merged upward and the tail beyond the last group is pooled.
struct ChiSquare {
  double chi2 = 0.0;
  int groups = 0;
};
ChiSquare pearson_chi2(const CountHistogram& h, const HistogramModel& m, StateLabel state, double min_expected = 5.0);

/// Sum over bins of count * log P(n).
double log_likelihood(const CountHistogram& h, const HistogramModel& m, StateLabel state);

nlohmann::json to_json(const HistogramModel& m);
HistogramModel histogram_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& doc);

}  // namespace ionstate
