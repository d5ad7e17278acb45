#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "ionstate/detection.hpp"
#include "ionstate/presets.hpp"
#include "ionstate/pumping.hpp"
#include "ionstate/raman_transfer.hpp"

namespace ionstate::cli {

inline constexpr std::uint64_t kDefaultSeed = 20080414;

/// Everything a run can be configured with. Nested sections are optional in the
/// JSON file; missing ones fall back to the shipped defaults.
struct ExperimentConfig {
  AtomOverrides atom_overrides;
  std::optional<nlohmann::json> atom_full;  // complete level table instead of overrides
  presets::Calibration calibration;
  std::optional<nlohmann::json> detection;  // applied on top of the preset setup
  HistogramModel histogram{0.44, 8.7, 5.8e-3, 3.4e-3, 1e-3};
  TransferConfig transfer = default_transfer_config();
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> output_dir;

  AtomModel atom() const;
  DetectionSetup detection_setup() const;
};

/// Throws ValidationError on malformed JSON or broken invariants.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& doc);

}  // namespace ionstate::cli
