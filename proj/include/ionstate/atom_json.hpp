#pragma once

#include "json.hpp"

#include "ionstate/atom.hpp"

namespace ionstate {

nlohmann::json to_json(const AtomModel& model);
AtomModel atom_from_json(const nlohmann::json& doc);

AtomOverrides overrides_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AtomOverrides& overrides);

}  // namespace ionstate
