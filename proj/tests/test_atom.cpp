#include <cmath>

#include "doctest.h"

#include "ionstate/atom.hpp"
#include "ionstate/atom_json.hpp"
#include "ionstate/errors.hpp"

using namespace ionstate;
using namespace ionstate::constants;

namespace {

Sublevel sub(LevelLabel l, int F, int m) { return Sublevel{l, F, m}; }

}  // namespace

TEST_SUITE("atom") {
  TEST_CASE("g-factors") {
    const auto atom = build_ba137();
    const auto& d = atom.level(LevelLabel::D32);
    CHECK(lande_gF(d, 1) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(std::abs(lande_gF(d, 1) - lande_gF(d, 2)) < 1e-12);
    CHECK(std::abs(lande_gF(d, 2) - lande_gF(d, 3)) < 1e-12);
    CHECK(lande_gF(d, 0) == 0.0);
    CHECK(lande_gF(atom.level(LevelLabel::S12), 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lande_gF(atom.level(LevelLabel::S12), 1) == doctest::Approx(-0.5).epsilon(1e-12));
  }

  TEST_CASE("Zeeman shifts") {
    const auto atom = build_ba137();
    CHECK(atom.zeeman_shift(sub(LevelLabel::D32, 2, 0), 1e-3) == 0.0);
    CHECK(atom.zeeman_shift(sub(LevelLabel::D32, 2, 1), 3e-4) ==
          doctest::Approx(atom.zeeman_shift(sub(LevelLabel::D32, 3, 1), 3e-4)).epsilon(1e-12));
    // g_F mu_B m B / hbar with g_F = 1/2, m = 2
    const double expect = kBohrMagneton * 1e-4 / kHbar;
    CHECK(atom.zeeman_shift(sub(LevelLabel::S12, 2, 2), 1e-4) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(atom.zeeman_shift(sub(LevelLabel::S12, 2, 2), 1e-4) == doctest::Approx(kTwoPi * 1.4e6).epsilon(0.02));
  }

  TEST_CASE("default level structure") {
    const auto atom = build_ba137();
    CHECK(atom.sublevels().size() == 32);
    CHECK(atom.sublevels_of(LevelLabel::P32).size() == 16);
    CHECK(std::abs(atom.hyperfine_interval_hz(LevelLabel::S12, 2, 1)) == doctest::Approx(8.036e9).epsilon(1e-3 / 8036));
    CHECK(std::abs(atom.hyperfine_interval_hz(LevelLabel::P12, 2, 1)) == doctest::Approx(1.488e9).epsilon(5.0 / 1488));
    CHECK(atom.level(LevelLabel::P32).offset_thz - atom.level(LevelLabel::P12).offset_thz == doctest::Approx(50.0));
    const double d5 = atom.transition_hz(LevelLabel::D32, 0, LevelLabel::P12, 1);
    const double f3f2 = atom.transition_hz(LevelLabel::D32, 3, LevelLabel::P12, 2);
    CHECK(std::abs(d5 - f3f2) == doctest::Approx(394e6).epsilon(10.0 / 394));
    // F'=2 <-> F''=2 line against the three pi repumpers.
    const double line = atom.transition_hz(LevelLabel::D32, 2, LevelLabel::P12, 2);
    for (int F : {0, 1, 2}) CHECK(std::abs(line - atom.transition_hz(LevelLabel::D32, F, LevelLabel::P12, 1)) > 850e6);
  }

  TEST_CASE("dipole amplitudes") {
    const auto atom = build_ba137();
    CHECK(atom.dipole_amplitude(sub(LevelLabel::P12, 1, 0), sub(LevelLabel::S12, 1, 0), 0) == 0.0);
    for (const auto& e : atom.sublevels_of(LevelLabel::P12))
      for (int q : {0, 1}) CHECK(atom.dipole_amplitude(e, sub(LevelLabel::D32, 3, 3), q) == 0.0);
    double sum = 0.0;
    for (const auto& g : atom.sublevels_of(LevelLabel::D32))
      for (int q = -1; q <= 1; ++q) sum += std::pow(atom.dipole_amplitude(sub(LevelLabel::P12, 2, 2), g, q), 2);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(atom.dipole_amplitude(sub(LevelLabel::D32, 1, 0), sub(LevelLabel::S12, 1, 0), 0), DomainError);
    CHECK_THROWS_AS(atom.dipole_amplitude(sub(LevelLabel::P12, 1, 0), sub(LevelLabel::S12, 1, 0), 2), DomainError);
  }

  TEST_CASE("selection rules hold exhaustively") {
    const auto atom = build_ba137();
    int checked = 0;
    for (const auto& e : atom.sublevels_of(LevelLabel::P12)) {
      for (const auto& g : atom.sublevels()) {
        if (g.level == LevelLabel::P12) continue;
        for (int q = -1; q <= 1; ++q) {
          const bool allowed = (e.m - g.m) == HalfInt(q) && abs(e.F - g.F) <= HalfInt(1);
          if (!allowed) CHECK(atom.dipole_amplitude(e, g, q) == 0.0);
          ++checked;
        }
      }
    }
    CHECK(checked == 8 * 24 * 3);
  }

  TEST_CASE("branching ratios") {
    const auto atom = build_ba137();
    for (const auto& e : atom.sublevels_of(LevelLabel::P12)) {
      double s = 0.0;
      for (const auto& g : atom.sublevels())
        if (g.level != LevelLabel::P12) s += atom.branching_ratio(e, g);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    const double b = atom.branching_ratio(sub(LevelLabel::P12, 2, 2), sub(LevelLabel::D32, 3, 3));
    CHECK(b == doctest::Approx(0.134).epsilon(1e-9));
    CHECK(std::abs(b / 0.125 - 1.0) <= 0.2);
    for (int m = -3; m <= 3; ++m) CHECK(atom.branching_ratio(sub(LevelLabel::P12, 1, 0), sub(LevelLabel::D32, 3, m)) == 0.0);
  }

  TEST_CASE("overrides") {
    AtomOverrides o;
    o.nuclear_spin = HalfInt(0);
    const auto bare = build_ba137(o);
    CHECK(bare.sublevels().size() == 8);

    AtomOverrides bad;
    bad.levels[LevelLabel::P12].decay_fractions = std::map<LevelLabel, double>{{LevelLabel::S12, 0.5}};
    CHECK_THROWS_AS(build_ba137(bad), ValidationError);
    AtomOverrides neg;
    neg.levels[LevelLabel::P12].linewidth_hz = -1.0;
    CHECK_THROWS_AS(build_ba137(neg), ValidationError);

    AtomOverrides field;
    field.field_tesla = 1e-4;
    CHECK(build_ba137(field).field_tesla() == 1e-4);
  }

  TEST_CASE("JSON round trip") {
    const auto atom = build_ba137();
    const auto back = atom_from_json(to_json(atom));
    REQUIRE(back.sublevels().size() == atom.sublevels().size());
    for (std::size_t i = 0; i < atom.sublevels().size(); ++i) {
      CHECK(back.sublevels()[i] == atom.sublevels()[i]);
      CHECK(back.energy(atom.sublevels()[i]) == atom.energy(atom.sublevels()[i]));
    }
    CHECK(to_json(back) == to_json(atom));
    AtomOverrides o;
    o.field_tesla = 2e-4;
    o.levels[LevelLabel::D32].A_mhz = 190.0;
    CHECK(to_json(overrides_from_json(to_json(o))) == to_json(o));
    CHECK_THROWS_AS(atom_from_json(nlohmann::json{{"levels", 3}}), ValidationError);
  }
}
