#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ionstate/detection.hpp"
#include "ionstate/errors.hpp"
#include "ionstate/special.hpp"

using namespace ionstate;

namespace {

const HistogramModel kReference{0.44, 8.7, 5.8e-3, 3.4e-3, 1e-3};
constexpr double kNever = std::numeric_limits<double>::infinity();

HistogramModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HistogramModel m;
  m.window = 1e-3;
  m.nbar_dark = 0.02 + 1.5 * u(rng);
  m.nbar_bright = m.nbar_dark + 1.0 + 20.0 * u(rng);
  m.tau_bright = m.window * std::pow(10.0, -0.5 + 2.5 * u(rng));
  // Keep beta_dark below 1 so the dark expression is defined.
  const double tau_d_min = 1.05 * m.window / (m.nbar_bright - m.nbar_dark);
  m.tau_dark = std::max(tau_d_min, m.window * std::pow(10.0, -0.5 + 2.5 * u(rng)));
  return m;
}

double total_variation(const HistogramModel& m, StateLabel state, const CountHistogram& h) {
  const int top = std::max(m.n_max(), h.max_count()) + 5;
  const double N = static_cast<double>(h.total());
  double tv = 0.0;
  for (int n = 0; n <= top; ++n) {
    const auto it = h.bins.find(n);
    const double emp = it == h.bins.end() ? 0.0 : static_cast<double>(it->second) / N;
    tv += std::abs(emp - state_pmf(m, state, n));
  }
  return 0.5 * tv;
}

}  // namespace

TEST_SUITE("detection") {
  TEST_CASE("model validation") {
    CHECK_NOTHROW(kReference.validate());
    CHECK_THROWS_AS((HistogramModel{-0.1, 8.7, 1e-3, 1e-3, 1e-3}.validate()), DomainError);
    CHECK_THROWS_AS((HistogramModel{2.0, 1.0, 1e-3, 1e-3, 1e-3}.validate()), DomainError);
    CHECK_THROWS_AS((HistogramModel{0.4, 8.7, 0.0, 1e-3, 1e-3}.validate()), DomainError);
    CHECK_THROWS_AS((HistogramModel{0.4, 8.7, 1e-3, 1e-3, 0.0}.validate()), DomainError);
    // beta_dark = 1e-3 / (1e-4 * 1.0) = 10
    CHECK_THROWS_AS(dark_pmf(HistogramModel{0.5, 1.5, 1e-4, 1e-3, 1e-3}, 0), DomainError);
  }

  TEST_CASE("reference model: zero-count bright probability") {
    CHECK(bright_pmf(kReference, 0) == doctest::Approx(0.023).epsilon(0.002 / 0.023));
    CHECK(bright_pmf(kReference, 0) == doctest::Approx(0.022263880807355918).epsilon(1e-12));
  }

  TEST_CASE("reference model normalization") {
    double sb = 0.0, sd = 0.0;
    for (int n = 0; n <= 200; ++n) {
      sb += bright_pmf(kReference, n);
      sd += dark_pmf(kReference, n);
    }
    CHECK(sb == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("no-pumping limit is Poisson") {
    // The gap closes linearly in window / tau; frozen against a 40-digit evaluation.
    auto m = kReference;
    double gap9 = 0.0, gap10 = 0.0;
    for (int n = 0; n <= 60; ++n) {
      m.tau_bright = 1e9 * m.window;
      gap9 = std::max(gap9, std::abs(bright_pmf(m, n) - oracle::poisson(m.nbar_bright, n)));
      m.tau_bright = 1e10 * m.window;
      gap10 = std::max(gap10, std::abs(bright_pmf(m, n) - oracle::poisson(m.nbar_bright, n)));
    }
    CHECK(gap9 == doctest::Approx(1.1256176449e-10).epsilon(1e-4));
    CHECK(gap10 < 1e-10);
    CHECK(gap10 == doctest::Approx(gap9 / 10).epsilon(1e-3));

    m.tau_dark = 1e10 * m.window;
    double dark_gap = 0.0;
    for (int n = 0; n <= 60; ++n) dark_gap = std::max(dark_gap, std::abs(dark_pmf(m, n) - oracle::poisson(m.nbar_dark, n)));
    CHECK(dark_gap < 1e-10);

    m.tau_bright = m.tau_dark = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= 60; ++n) {
      CHECK(bright_pmf(m, n) == doctest::Approx(oracle::poisson(m.nbar_bright, n)).epsilon(1e-13));
      CHECK(dark_pmf(m, n) == doctest::Approx(oracle::poisson(m.nbar_dark, n)).epsilon(1e-13));
    }
  }

  TEST_CASE("Poisson gap below 1e-10 at tau_b = 1e9 windows" * doctest::should_fail()) {
    // The first-order gap is window / tau_b times an O(0.1) factor, so 1e-9 leaves 1.13e-10.
    auto m = kReference;
    m.tau_bright = 1e9 * m.window;
    double gap = 0.0;
    for (int n = 0; n <= 60; ++n) gap = std::max(gap, std::abs(bright_pmf(m, n) - oracle::poisson(m.nbar_bright, n)));
    CHECK(gap < 1e-10);
  }

  TEST_CASE("normalization over random models") {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    bool nonneg = true;
    for (int i = 0; i < 1000; ++i) {
      const auto m = random_model(rng);
      for (auto st : {StateLabel::Bright, StateLabel::Dark}) {
        const auto t = pmf_table(m, st, m.n_max());
        double s = 0.0;
        for (double p : t) {
          s += p;
          nonneg = nonneg && p >= 0.0;
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    CHECK(nonneg);
    CHECK(worst < 1e-9);
  }

  TEST_CASE("telegraph samples match the analytic forms") {
    for (auto st : {StateLabel::Bright, StateLabel::Dark}) {
      CHECK(total_variation(kReference, st, telegraph_histogram(kReference, st, 1'000'000, 7)) < 0.005);
    }
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 5; ++i) {
      const auto m = random_model(rng);
      for (auto st : {StateLabel::Bright, StateLabel::Dark}) {
        CHECK(total_variation(m, st, telegraph_histogram(m, st, 200'000, 100 + i)) < 0.01);
      }
    }
  }

  TEST_CASE("dark-state mass above two counts") {
    double analytic = 0.0;
    for (int n = 0; n <= 2; ++n) analytic += dark_pmf(kReference, n);
    analytic = 1.0 - analytic;
    const auto h = telegraph_histogram(kReference, StateLabel::Dark, 1'000'000, 21);
    std::int64_t above = 0;
    for (const auto& [n, c] : h.bins)
      if (n > 2) above += c;
    CHECK(analytic == doctest::Approx(above / 1e6).epsilon(0.005 / analytic));
  }

  TEST_CASE("telegraph sampling: limits and determinism") {
    auto frozen = kReference;
    frozen.tau_bright = frozen.tau_dark = 1e12;
    const auto h = telegraph_histogram(frozen, StateLabel::Bright, 200'000, 5);
    CHECK(h.mean() == doctest::Approx(8.7).epsilon(0.01));
    CHECK(h.variance() == doctest::Approx(8.7).epsilon(0.03));

    auto same = kReference;
    same.nbar_dark = same.nbar_bright = 3.0;
    CHECK(telegraph_histogram(same, StateLabel::Bright, 5000, 8).bins ==
          telegraph_histogram(same, StateLabel::Dark, 5000, 8).bins);
    CHECK(telegraph_sample(kReference, StateLabel::Bright, 77) == telegraph_sample(kReference, StateLabel::Bright, 77));
  }

  TEST_CASE("threshold: Poisson limit against an exhaustive scan") {
    HistogramModel m{0.44, 8.7, kNever, kNever, 1e-3};
    const auto t = optimal_threshold(m);
    const auto ref = oracle::poisson_threshold_scan(0.44, 8.7, m.n_max());
    CHECK(t.n_c == 3);
    CHECK(t.n_c == ref.n_c);
    CHECK(t.bright_error == doctest::Approx(ref.eb).epsilon(1e-8));
    CHECK(t.dark_error == doctest::Approx(ref.ed).epsilon(1e-8));
  }

  TEST_CASE("threshold: no dark counts") {
    HistogramModel m{0.0, 8.7, kNever, kNever, 1e-3};
    const auto t = optimal_threshold(m);
    CHECK(t.n_c == 1);
    CHECK(t.dark_error == 0.0);
  }

  TEST_CASE("threshold: indistinguishable states") {
    HistogramModel m{4.0, 4.0, 1e-3, 1e-3, 1e-3};
    const auto t = optimal_threshold(m);
    CHECK(t.mean_error() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.n_c == 1);
    CHECK(detection_fidelity(m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(classify(3, m).posterior == doctest::Approx(0.5));
    CHECK(classify(3, m).label == StateLabel::Bright);
  }

  TEST_CASE("reference model fidelity") {
    const auto t = optimal_threshold(kReference);
    CHECK(t.n_c == 3);
    CHECK(t.bright_error == doctest::Approx(0.0911245742216146).epsilon(1e-10));
    CHECK(t.dark_error == doctest::Approx(0.12039305760897051).epsilon(1e-10));
    CHECK(detection_fidelity(kReference) == doctest::Approx(0.8942411840847074).epsilon(1e-12));
    CHECK(detection_fidelity(kReference) == doctest::Approx(0.896).epsilon(0.010 / 0.896));
  }

  TEST_CASE("fidelity approaches one for separated Poisson states") {
    CHECK(detection_fidelity(HistogramModel{0.0, 60.0, kNever, kNever, 1e-3}) > 1.0 - 1e-12);
  }

  TEST_CASE("fidelity is nonincreasing as pumping speeds up") {
    for (double tb = 100e-3; tb > 0.2e-3; tb *= 0.8) {
      double prev = 2.0;
      for (double td = 100e-3; td > 0.2e-3; td *= 0.8) {
        const double f = detection_fidelity(HistogramModel{0.44, 8.7, td, tb, 1e-3});
        CHECK(f <= prev + 1e-12);
        prev = f;
      }
    }
    for (double td = 100e-3; td > 0.2e-3; td *= 0.8) {
      double prev = 2.0;
      for (double tb = 100e-3; tb > 0.2e-3; tb *= 0.8) {
        const double f = detection_fidelity(HistogramModel{0.44, 8.7, td, tb, 1e-3});
        CHECK(f <= prev + 1e-12);
        prev = f;
      }
    }
  }

  TEST_CASE("mean error is symmetric in the error labels") {
    const auto t = optimal_threshold(kReference);
    Threshold swapped{t.n_c, t.dark_error, t.bright_error};
    CHECK(swapped.mean_error() == t.mean_error());
    CHECK(detection_fidelity(kReference) == doctest::Approx(1.0 - t.mean_error()));
  }

  TEST_CASE("classification") {
    // Equal priors. Dark-to-bright pumping puts weight in both tails, so the
    // posteriors stay below 0.99 (40-digit reference: 0.96133780711, 0.98212254498).
    const auto zero = classify(0, kReference);
    CHECK(zero.label == StateLabel::Dark);
    CHECK(zero.posterior == doctest::Approx(0.96133780710622675).epsilon(1e-10));
    const auto twenty = classify(20, kReference);
    CHECK(twenty.label == StateLabel::Bright);
    CHECK(twenty.posterior == doctest::Approx(0.98212254497968843).epsilon(1e-10));
    for (int n = 0; n < 40; ++n) {
      const double pb = bright_pmf(kReference, n), pd = dark_pmf(kReference, n);
      const auto c = classify(n, kReference);
      CHECK(c.posterior == doctest::Approx((c.label == StateLabel::Bright ? pb : pd) / (pb + pd)).epsilon(1e-12));
    }
  }

  TEST_CASE("classification posteriors above 0.99 at n = 0 and n = 20" * doctest::should_fail()) {
    CHECK(classify(0, kReference).posterior > 0.99);
    CHECK(classify(20, kReference).posterior > 0.99);
  }

  TEST_CASE("classification is confident without pumping") {
    auto m = kReference;
    m.tau_bright = m.tau_dark = kNever;
    CHECK(classify(0, m).label == StateLabel::Dark);
    CHECK(classify(0, m).posterior > 0.99);
    CHECK(classify(20, m).label == StateLabel::Bright);
    CHECK(classify(20, m).posterior > 0.99);
  }

  TEST_CASE("classifier matches the threshold rule when the likelihood ratio is monotone") {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
      const auto m = random_model(rng);
      const int top = m.n_max();
      bool monotone = true;
      for (int n = 0; n < top && monotone; ++n) {
        const double r0 = bright_pmf(m, n) / dark_pmf(m, n), r1 = bright_pmf(m, n + 1) / dark_pmf(m, n + 1);
        monotone = r1 >= r0;
      }
      if (!monotone) continue;
      ++checked;
      const int nc = optimal_threshold(m).n_c;
      for (int n = 0; n <= top; ++n) {
        const bool bright = classify(n, m).label == StateLabel::Bright;
        if (bright != (n >= nc)) {
          // Only a likelihood tie at the boundary may disagree.
          CHECK(bright_pmf(m, n) == doctest::Approx(dark_pmf(m, n)).epsilon(1e-9));
        }
      }
    }
    CHECK(checked > 100);
  }
}
