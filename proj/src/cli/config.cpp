#include "cli/config.hpp"

#include <fstream>

#include "ionstate/atom_json.hpp"
#include "ionstate/errors.hpp"
#include "ionstate/histfit.hpp"
#include "ionstate/pumping_json.hpp"

namespace ionstate::cli {

using nlohmann::json;

AtomModel ExperimentConfig::atom() const {
  if (atom_full) return atom_from_json(*atom_full);
  return build_ba137(atom_overrides);
}

DetectionSetup ExperimentConfig::detection_setup() const {
  auto setup = presets::detection_setup(atom(), calibration);
  if (detection) setup = setup_from_json(*detection, setup);
  return setup;
}

namespace {

presets::Calibration calibration_from_json(const json& doc, presets::Calibration c) {
  static const std::pair<const char*, double presets::Calibration::*> fields[] = {
      {"cooling_rabi_hz", &presets::Calibration::cooling_rabi_hz},
      {"cooling_detuning_hz", &presets::Calibration::cooling_detuning_hz},
      {"repump_rabi_hz", &presets::Calibration::repump_rabi_hz},
      {"repump_f0_rabi_hz", &presets::Calibration::repump_f0_rabi_hz},
      {"clear_rabi_hz", &presets::Calibration::clear_rabi_hz},
      {"raman_rabi_hz", &presets::Calibration::raman_rabi_hz},
      {"raman_detuning_hz", &presets::Calibration::raman_detuning_hz},
      {"collection_efficiency", &presets::Calibration::collection_efficiency},
      {"background_rate", &presets::Calibration::background_rate},
      {"window", &presets::Calibration::window},
      {"prep_modulation_hz", &presets::Calibration::prep_modulation_hz},
  };
  for (const auto& [key, _] : doc.items()) {
    bool known = false;
    for (const auto& [name, member] : fields) {
      if (key == name) {
        c.*member = doc.at(key).get<double>();
        known = true;
      }
    }
    if (!known) throw ValidationError("calibration: unknown field '" + key + "'");
  }
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  ExperimentConfig c;
  try {
    if (doc.contains("atom")) {
      const auto& a = doc.at("atom");
      if (a.contains("levels") && a.at("levels").is_array()) {
        c.atom_full = a;
      } else {
        c.atom_overrides = overrides_from_json(a);
      }
      (void)c.atom();
    }
    if (doc.contains("calibration")) c.calibration = calibration_from_json(doc.at("calibration"), c.calibration);
    if (doc.contains("detection")) c.detection = doc.at("detection");
    if (doc.contains("histogram_model")) c.histogram = histogram_model_from_json(doc.at("histogram_model"));
    if (doc.contains("transfer")) c.transfer = transfer_config_from_json(doc.at("transfer"), c.transfer);
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace ionstate::cli
