#pragma once

#include "json.hpp"

#include "ionstate/pumping.hpp"

namespace ionstate {

// Frequencies cross the JSON boundary in Hz (not rad/s).
nlohmann::json to_json(const BeamConfig& beam);
BeamConfig beam_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const RamanPairConfig& pair);
RamanPairConfig raman_pair_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DetectionSetup& setup);
/// Reads a setup; beams and pairs not given fall back to `defaults`.
DetectionSetup setup_from_json(const nlohmann::json& doc, const DetectionSetup& defaults);

}  // namespace ionstate
