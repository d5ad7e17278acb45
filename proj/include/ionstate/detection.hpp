#pragma once

#include <cstdint>
#include <vector>

#include "ionstate/histogram.hpp"

namespace ionstate {

/// Single-jump telegraph model of the photon counts in one detection window.
struct HistogramModel {
  double nbar_dark = 0.0;    // mean counts per window, dark state
  double nbar_bright = 0.0;  // mean counts per window, bright state
  double tau_dark = 0.0;     // s, time to pump out of the dark state
  double tau_bright = 0.0;   // s, time to pump out of the bright state
  double window = 0.0;       // s

  /// Throws DomainError. nbar_bright == nbar_dark is allowed and makes the
  /// two distributions the same Poisson law.
  void validate() const;
  double beta_bright() const;
  double beta_dark() const;
  /// Largest count kept when summing: Poisson(nbar_bright) tail below 1e-12.
  int n_max() const;
};

enum class StateLabel { Bright, Dark };
const char* to_string(StateLabel label);

double bright_pmf(const HistogramModel& m, int n);
/// Throws DomainError when beta_dark >= 1.
double dark_pmf(const HistogramModel& m, int n);
double state_pmf(const HistogramModel& m, StateLabel state, int n);

/// P(0..n_max) for one state.
std::vector<double> pmf_table(const HistogramModel& m, StateLabel state, int n_max);

/// One window: jump time ~ Exp(tau of the initial state), Poisson counts at
/// the initial rate before the jump and the other rate after.
int telegraph_sample(const HistogramModel& m, StateLabel initial, std::uint64_t seed);
/// `count` windows, window i seeded with derive_seed(seed, i).
CountHistogram telegraph_histogram(const HistogramModel& m, StateLabel initial, std::int64_t count,
                                   std::uint64_t seed);

struct Threshold {
  int n_c = 1;                 // bright iff n >= n_c
  double bright_error = 0.0;   // P_b(n < n_c)
  double dark_error = 0.0;     // P_d(n >= n_c)
  double mean_error() const { return 0.5 * (bright_error + dark_error); }
};

Threshold optimal_threshold(const HistogramModel& m);
double detection_fidelity(const HistogramModel& m);

struct Classification {
  StateLabel label = StateLabel::Dark;
  double posterior = 0.5;
};

/// Equal-prior likelihood ratio. Ties go to bright.
Classification classify(int n, const HistogramModel& m);

}  // namespace ionstate
