#include <doctest.h>

#include <cmath>

#include "curecheck/diagnostics.hpp"
#include "curecheck/errors.hpp"
#include "curecheck/simulate.hpp"
#include "support.hpp"

using namespace curecheck;

TEST_CASE("nonparametric evidence at the extremes") {
  auto all_events = nonparametric_cure_evidence(validate_sample({{1, true}, {2, true}}));
  CHECK(all_events.p_hat == 1.0);
  CHECK(all_events.cure_fraction_hat == 0.0);
  CHECK_FALSE(all_events.deviance);

  auto all_cens = nonparametric_cure_evidence(validate_sample({{1, false}, {2, false}}));
  CHECK(all_cens.p_hat == 0.0);
  CHECK(all_cens.cure_fraction_hat == 1.0);
}

TEST_CASE("nonparametric cure fraction on the fixture with a 0.2570 plateau") {
  std::vector<Observation> raw;
  for (int i = 0; i < 743; ++i) raw.push_back({0.01 + 0.005 * i, true});
  for (int i = 0; i < 257; ++i) raw.push_back({17.7248 - 0.01 * i, false});
  auto ev = nonparametric_cure_evidence(validate_sample(raw));
  CHECK(ev.cure_fraction_hat == doctest::Approx(0.2570).epsilon(1e-12));
}

TEST_CASE("deviance p-value uses the boundary mixture") {
  CHECK(deviance_p_value(0.0) == 0.5);
  CHECK(deviance_p_value(2.705543454095404) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(deviance_p_value(10.0) < deviance_p_value(1.0));
}

TEST_CASE("deviance test detects a clear cure fraction") {
  auto sim = simulate_mixture(testkit::recovery_config(5, 500));
  auto ev = deviance_cure_test(sim.sample, Family::weibull);
  REQUIRE(ev.deviance);
  CHECK(*ev.deviance > 10.0);
  CHECK(*ev.deviance_p_value < 1e-3);
  auto fit_c = fit_model(sim.sample, {Family::weibull, true}, {.standard_errors = false});
  auto fit_n = fit_model(sim.sample, {Family::weibull, false}, {.standard_errors = false});
  CHECK(*ev.deviance == doctest::Approx(2 * (fit_c.log_likelihood - fit_n.log_likelihood)).epsilon(1e-9));
}

TEST_CASE("alpha_n arithmetic") {
  CHECK(alpha_n_statistic(5, 10) == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-15));
  CHECK(alpha_n_statistic(0, 10) == 1.0);
  CHECK(alpha_n_statistic(10, 10) == 0.0);
}

TEST_CASE("alpha_n test: largest observation is an event") {
  auto t = alpha_n_test(validate_sample({{1, false}, {2, true}, {3, true}}));
  CHECK(t.n_n == 0);
  CHECK(t.alpha_n == 1.0);
  CHECK_FALSE(t.sufficient_followup);
}

TEST_CASE("alpha_n test counts events in (2Y* - Y, Y*]") {
  // Y = 10, Y* = 8: interval (6, 8]
  auto s = validate_sample({{1, true}, {6, true}, {6.5, true}, {7, false}, {8, true}, {10, false}});
  auto t = alpha_n_test(s);
  CHECK(t.y_max == 10.0);
  CHECK(t.y_max_event == 8.0);
  CHECK(t.interval_lower == 6.0);
  CHECK(t.interval_upper == 8.0);
  CHECK(t.n_n == 2);  // 6.5 and 8; 6 sits on the open end
  CHECK(t.alpha_n == doctest::Approx(std::pow(1.0 - 2.0 / 6.0, 6)).epsilon(1e-15));
  CHECK(t.sufficient_followup == (t.alpha_n < 0.05));
}

TEST_CASE("alpha_n test: n = 10 with five events in the window is sufficient") {
  // Y = 20, Y* = 15, window (10, 15] holds events 11..15
  std::vector<Observation> raw{{1, true}, {2, false}, {3, false}, {4, false}};
  for (int t = 11; t <= 15; ++t) raw.push_back({double(t), true});
  raw.push_back({20, false});
  auto test = alpha_n_test(validate_sample(raw));
  CHECK(test.n == 10);
  CHECK(test.n_n == 5);
  CHECK(test.alpha_n == doctest::Approx(0.0009765625).epsilon(1e-12));
  CHECK(test.sufficient_followup);
}

TEST_CASE("alpha_n test errors") {
  CHECK_THROWS_AS(alpha_n_test(validate_sample({{1, false}})), AssessmentError);
  CHECK_THROWS_AS(alpha_n_test(validate_sample({{1, true}}), 0.0), ValidationError);
  CHECK_THROWS_AS(alpha_n_test(validate_sample({{1, true}}), 1.0), ValidationError);
}

TEST_CASE("alpha_n on truncated follow-up sits near its geometric limit") {
  // After truncation the count in the window is 1 + M with P(M = m) = 2^-(m+1)
  // for locally flat event intensity, so alpha_n >= 0.05 (N_n <= 2) about 3/4 of the time.
  int insufficient = 0;
  const int reps = 400;
  for (int i = 0; i < reps; ++i) {
    auto cfg = testkit::recovery_config(replicate_seed(99, i), 200);
    cfg.censoring = Censoring::administrative(20.0);
    auto sim = simulate_mixture(cfg);
    const double cut = latency_quantile(Family::weibull, cfg.latency, 0.4);
    if (!alpha_n_test(restrict_followup(sim.sample, cut)).sufficient_followup) ++insufficient;
  }
  const double rate = double(insufficient) / reps;
  MESSAGE("truncated insufficient rate = " << rate);
  CHECK(rate == doctest::Approx(0.75).epsilon(0.08));
}
