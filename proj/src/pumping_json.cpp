#include "ionstate/pumping_json.hpp"

#include <cmath>

#include "ionstate/atom_json.hpp"
#include "ionstate/errors.hpp"

namespace ionstate {

using nlohmann::json;
using constants::kTwoPi;

namespace {

json complex_to_json(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& j) {
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.get<double>(), 0.0};
}

template <typename Fn>
auto wrap(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const BeamConfig& b) {
  json sidebands = json::array();
  for (const auto& sb : b.sidebands) sidebands.push_back({{"offset_hz", sb.offset / kTwoPi}, {"amplitude", sb.amplitude}});
  return {{"name", b.name},
          {"lower", std::string(to_string(b.lower))},
          {"lower_F", b.lower_F.value()},
          {"upper", std::string(to_string(b.upper))},
          {"upper_F", b.upper_F.value()},
          {"polarization",
           {{"sigma-", complex_to_json(b.pol[0])}, {"pi", complex_to_json(b.pol[1])}, {"sigma+", complex_to_json(b.pol[2])}}},
          {"detuning_hz", b.detuning / kTwoPi},
          {"rabi_hz", b.rabi / kTwoPi},
          {"sidebands", sidebands},
          {"extinction_db", b.extinction_db ? json(*b.extinction_db) : json(nullptr)},
          {"enabled", b.enabled}};
}

BeamConfig beam_from_json(const json& doc) {
  return wrap("beam JSON", [&] {
    BeamConfig b;
    b.name = doc.at("name").get<std::string>();
    b.lower = parse_level_label(doc.at("lower").get<std::string>());
    b.lower_F = HalfInt::from_double(doc.at("lower_F").get<double>());
    b.upper = parse_level_label(doc.value("upper", std::string("P1/2")));
    b.upper_F = HalfInt::from_double(doc.at("upper_F").get<double>());
    const auto& pol = doc.at("polarization");
    if (pol.is_string()) {
      const auto name = pol.get<std::string>();
      if (name == "pi") b.pol = polarization::pi();
      else if (name == "sigma+") b.pol = polarization::sigma_plus();
      else if (name == "sigma-") b.pol = polarization::sigma_minus();
      else if (name == "perpendicular") b.pol = polarization::perpendicular();
      else throw ValidationError("unknown polarization '" + name + "'");
    } else {
      b.pol = {complex_from_json(pol.value("sigma-", json(0.0))), complex_from_json(pol.value("pi", json(0.0))),
               complex_from_json(pol.value("sigma+", json(0.0)))};
    }
    b.detuning = kTwoPi * doc.value("detuning_hz", 0.0);
    b.rabi = kTwoPi * doc.at("rabi_hz").get<double>();
    if (doc.contains("sidebands")) {
      for (const auto& sb : doc.at("sidebands")) {
        b.sidebands.push_back({kTwoPi * sb.at("offset_hz").get<double>(), sb.value("amplitude", 1.0)});
      }
    }
    if (doc.contains("extinction_db") && !doc.at("extinction_db").is_null()) {
      b.extinction_db = doc.at("extinction_db").get<double>();
    }
    b.enabled = doc.value("enabled", true);
    return b;
  });
}

json to_json(const RamanPairConfig& p) {
  return {{"name", p.name},
          {"pi_beam", to_json(p.pi_beam)},
          {"sigma_beam", to_json(p.sigma_beam)},
          {"detuning_hz", p.single_photon_detuning / kTwoPi},
          {"two_photon_detuning_hz", p.two_photon_detuning / kTwoPi}};
}

RamanPairConfig raman_pair_from_json(const json& doc) {
  return wrap("Raman pair JSON", [&] {
    RamanPairConfig p;
    p.name = doc.value("name", std::string("R"));
    p.pi_beam = beam_from_json(doc.at("pi_beam"));
    p.sigma_beam = beam_from_json(doc.at("sigma_beam"));
    p.single_photon_detuning = kTwoPi * doc.at("detuning_hz").get<double>();
    p.two_photon_detuning = kTwoPi * doc.value("two_photon_detuning_hz", 0.0);
    return p;
  });
}

json to_json(const DetectionSetup& s) {
  json beams = json::array(), pairs = json::array();
  for (const auto& b : s.beams) beams.push_back(to_json(b));
  for (const auto& p : s.raman_pairs) pairs.push_back(to_json(p));
  return {{"atom", to_json(s.atom)},
          {"beams", beams},
          {"raman_pairs", pairs},
          {"collection_efficiency", s.collection_efficiency},
          {"background_rate", s.background_rate},
          {"window", s.window},
          {"detuning_cutoff_hz", std::isfinite(s.detuning_cutoff) ? json(s.detuning_cutoff / kTwoPi) : json(nullptr)},
          {"prep_modulation_hz", s.prep_modulation / kTwoPi},
          {"prep_modulation_amplitude", s.prep_modulation_amplitude}};
}

DetectionSetup setup_from_json(const json& doc, const DetectionSetup& defaults) {
  return wrap("detection setup JSON", [&] {
    DetectionSetup s = defaults;
    if (doc.contains("atom")) s.atom = atom_from_json(doc.at("atom"));
    if (doc.contains("beams")) {
      s.beams.clear();
      for (const auto& b : doc.at("beams")) s.beams.push_back(beam_from_json(b));
    }
    if (doc.contains("raman_pairs")) {
      s.raman_pairs.clear();
      for (const auto& p : doc.at("raman_pairs")) s.raman_pairs.push_back(raman_pair_from_json(p));
    }
    s.collection_efficiency = doc.value("collection_efficiency", s.collection_efficiency);
    s.background_rate = doc.value("background_rate", s.background_rate);
    s.window = doc.value("window", s.window);
    if (doc.contains("detuning_cutoff_hz")) {
      const auto& c = doc.at("detuning_cutoff_hz");
      s.detuning_cutoff = c.is_null() ? kInfinity : kTwoPi * c.get<double>();
    }
    if (doc.contains("prep_modulation_hz")) s.prep_modulation = kTwoPi * doc.at("prep_modulation_hz").get<double>();
    s.prep_modulation_amplitude = doc.value("prep_modulation_amplitude", s.prep_modulation_amplitude);
    s.validate();
    return s;
  });
}

}  // namespace ionstate
