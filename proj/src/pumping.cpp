#include <algorithm>
#include <cmath>
#include <random>

#include "ionstate/errors.hpp"
#include "ionstate/presets.hpp"
#include "ionstate/pumping.hpp"
#include "ionstate/rng.hpp"

namespace ionstate {

DetectionSetup prep_setup(const DetectionSetup& setup, PrepVariant variant) {
  DetectionSetup out = setup;
  for (auto& b : out.beams) b.enabled = false;
  if (variant == PrepVariant::Dark) {
    for (const char* name : {"D1", "D2", "D3", "D4", "D5"}) presets::beam(out, name).enabled = true;
    for (const char* name : {"D1", "D2"}) {
      auto& b = presets::beam(out, name);
      std::vector<Sideband> extra{{out.prep_modulation, out.prep_modulation_amplitude}};
      for (const auto& sb : b.sidebands) {
        extra.push_back({sb.offset + out.prep_modulation, sb.amplitude * out.prep_modulation_amplitude});
      }
      b.sidebands.insert(b.sidebands.end(), extra.begin(), extra.end());
    }
  } else {
    for (const char* name : {"D3", "D4", "D5", "D6"}) presets::beam(out, name).enabled = true;
  }
  return out;
}

Eigen::VectorXd uniform_ground_distribution(const AtomModel& atom) {
  const auto n = static_cast<Eigen::Index>(ground_states(atom).size());
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

Eigen::VectorXd optical_pump_prepare(const DetectionSetup& setup, PrepVariant variant, double duration) {
  return optical_pump_prepare(setup, variant, duration, uniform_ground_distribution(setup.atom));
}

Eigen::VectorXd optical_pump_prepare(const DetectionSetup& setup, PrepVariant variant, double duration,
                                     const Eigen::VectorXd& p0) {
  if (duration == 0.0) return p0;
  const auto R = detection_rate_matrix(prep_setup(setup, variant));
  return evolve_populations(R, p0, duration);
}

DetectionSampler::DetectionSampler(const DetectionSetup& setup)
    : DetectionSampler(detection_rate_matrix(setup), setup.window, setup.background_rate) {}

DetectionSampler::DetectionSampler(RateMatrix R, double window, double background_rate)
    : R_(std::move(R)), window_(window), background_rate_(background_rate) {
  if (!(window_ > 0.0)) throw ValidationError("detection window must be > 0");
  const std::size_t n = R_.size();
  jump_cdf_.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const double out = R_.outflow(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j && out > 0.0) acc += R_.rates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / out;
      jump_cdf_[j][i] = acc;
    }
    if (out > 0.0) jump_cdf_[j].back() = std::max(jump_cdf_[j].back(), 1.0);
  }
}

namespace {

std::size_t draw_index(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

int DetectionSampler::sample(const Eigen::VectorXd& p0, std::uint64_t seed) const {
  if (p0.size() != static_cast<Eigen::Index>(R_.size())) throw ValidationError("population vector size mismatch");
  SplitMix64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double u = unif(rng) * p0.sum();
  std::size_t state = 0;
  for (double acc = 0.0; state + 1 < R_.size(); ++state) {
    acc += p0(static_cast<Eigen::Index>(state));
    if (u < acc) break;
  }

  // Photon counts are Poisson in the integrated emission along the path.
  double t = 0.0, integrated = 0.0;
  while (t < window_) {
    const double out = R_.outflow(state);
    const double dwell = out > 0.0 ? std::exponential_distribution<double>(out)(rng) : kInfinity;
    const double seg = std::min(dwell, window_ - t);
    integrated += R_.emission(static_cast<Eigen::Index>(state)) * seg;
    t += seg;
    if (t >= window_) break;
    state = draw_index(jump_cdf_[state], unif(rng));
  }
  integrated += background_rate_ * window_;
  if (integrated <= 0.0) return 0;
  return static_cast<int>(std::poisson_distribution<long long>(integrated)(rng));
}

CountHistogram DetectionSampler::sample_batch(const Eigen::VectorXd& p0, std::int64_t events,
                                              std::uint64_t seed) const {
  if (events < 1) throw ValidationError("need at least one detection event");
  CountHistogram h;
  for (std::int64_t i = 0; i < events; ++i) h.add(sample(p0, derive_seed(seed, static_cast<std::uint64_t>(i))));
  return h;
}

int simulate_detection(const DetectionSetup& setup, const Eigen::VectorXd& p0, std::uint64_t seed) {
  return DetectionSampler(setup).sample(p0, seed);
}

}  // namespace ionstate
