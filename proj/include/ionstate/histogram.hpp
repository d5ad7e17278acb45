#pragma once

#include <cstdint>
#include <map>

namespace ionstate {

/// Photon-count histogram: counts-per-window value n -> number of windows.
struct CountHistogram {
  std::map<int, std::int64_t> bins;

  void add(int n, std::int64_t times = 1) {
    if (times != 0) bins[n] += times;
  }
  void merge(const CountHistogram& other) {
    for (const auto& [n, c] : other.bins) bins[n] += c;
  }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [n, c] : bins) t += c;
    return t;
  }
  int max_count() const { return bins.empty() ? 0 : bins.rbegin()->first; }
  double mean() const {
    double s = 0.0;
    for (const auto& [n, c] : bins) s += static_cast<double>(n) * c;
    return bins.empty() ? 0.0 : s / total();
  }
  double variance() const {
    const double mu = mean();
    double s = 0.0;
    for (const auto& [n, c] : bins) s += (n - mu) * (n - mu) * c;
    return bins.empty() ? 0.0 : s / total();
  }
  void validate() const;
};

}  // namespace ionstate
