#include "ionstate/atom_json.hpp"

#include "ionstate/errors.hpp"

namespace ionstate {

using nlohmann::json;
using constants::kTwoPi;

namespace {

json decay_to_json(const std::map<LevelLabel, double>& fractions) {
  json out = json::object();
  for (const auto& [dest, frac] : fractions) out[std::string(to_string(dest))] = frac;
  return out;
}

std::map<LevelLabel, double> decay_from_json(const json& doc) {
  std::map<LevelLabel, double> out;
  for (const auto& [key, value] : doc.items()) out[parse_level_label(key)] = value.get<double>();
  return out;
}

}  // namespace

json to_json(const AtomModel& model) {
  json levels = json::array();
  for (const auto& l : model.levels()) {
    levels.push_back({{"label", std::string(to_string(l.label))},
                      {"L", l.L},
                      {"J", l.J.value()},
                      {"I", l.I.value()},
                      {"A_MHz", l.A_mhz},
                      {"B_MHz", l.B_mhz},
                      {"offset_THz", l.offset_thz},
                      {"linewidth_Hz", l.gamma / kTwoPi},
                      {"decay", decay_to_json(l.decay_fractions)},
                      {"coupling_scale", l.coupling_scale}});
  }
  return {{"field_tesla", model.field_tesla()}, {"levels", levels}};
}

AtomModel atom_from_json(const json& doc) {
  try {
    std::vector<LevelSpec> levels;
    for (const auto& l : doc.at("levels")) {
      LevelSpec spec;
      spec.label = parse_level_label(l.at("label").get<std::string>());
      spec.L = l.at("L").get<int>();
      spec.J = HalfInt::from_double(l.at("J").get<double>());
      spec.I = HalfInt::from_double(l.at("I").get<double>());
      spec.A_mhz = l.value("A_MHz", 0.0);
      spec.B_mhz = l.value("B_MHz", 0.0);
      spec.offset_thz = l.at("offset_THz").get<double>();
      spec.gamma = kTwoPi * l.value("linewidth_Hz", 0.0);
      if (l.contains("decay")) spec.decay_fractions = decay_from_json(l.at("decay"));
      spec.coupling_scale = l.value("coupling_scale", 1.0);
      levels.push_back(std::move(spec));
    }
    return AtomModel(std::move(levels), doc.at("field_tesla").get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("atom model JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("atom model JSON: ") + e.what());
  }
}

AtomOverrides overrides_from_json(const json& doc) {
  AtomOverrides o;
  try {
    if (doc.contains("nuclear_spin")) o.nuclear_spin = HalfInt::from_double(doc.at("nuclear_spin").get<double>());
    if (doc.contains("field_tesla")) o.field_tesla = doc.at("field_tesla").get<double>();
    if (doc.contains("levels")) {
      for (const auto& [key, l] : doc.at("levels").items()) {
        LevelOverride lo;
        if (l.contains("A_MHz")) lo.A_mhz = l.at("A_MHz").get<double>();
        if (l.contains("B_MHz")) lo.B_mhz = l.at("B_MHz").get<double>();
        if (l.contains("offset_THz")) lo.offset_thz = l.at("offset_THz").get<double>();
        if (l.contains("linewidth_Hz")) lo.linewidth_hz = l.at("linewidth_Hz").get<double>();
        if (l.contains("decay")) lo.decay_fractions = decay_from_json(l.at("decay"));
        if (l.contains("coupling_scale")) lo.coupling_scale = l.at("coupling_scale").get<double>();
        o.levels[parse_level_label(key)] = lo;
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("atom overrides JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("atom overrides JSON: ") + e.what());
  }
  return o;
}

json to_json(const AtomOverrides& o) {
  json out = json::object();
  if (o.nuclear_spin) out["nuclear_spin"] = o.nuclear_spin->value();
  if (o.field_tesla) out["field_tesla"] = *o.field_tesla;
  if (!o.levels.empty()) {
    json levels = json::object();
    for (const auto& [label, lo] : o.levels) {
      json l = json::object();
      if (lo.A_mhz) l["A_MHz"] = *lo.A_mhz;
      if (lo.B_mhz) l["B_MHz"] = *lo.B_mhz;
      if (lo.offset_thz) l["offset_THz"] = *lo.offset_thz;
      if (lo.linewidth_hz) l["linewidth_Hz"] = *lo.linewidth_hz;
      if (lo.decay_fractions) l["decay"] = decay_to_json(*lo.decay_fractions);
      if (lo.coupling_scale) l["coupling_scale"] = *lo.coupling_scale;
      levels[std::string(to_string(label))] = l;
    }
    out["levels"] = levels;
  }
  return out;
}

}  // namespace ionstate
