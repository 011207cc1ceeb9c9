#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "curecheck/errors.hpp"
#include "curecheck/simulate.hpp"
#include "support.hpp"

using namespace curecheck;

namespace {

double ks_distance(const SurvivalSample& s, Family f, const std::vector<double>& p) {
  const auto r = s.records();
  const double n = static_cast<double>(r.size());
  double d = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double cdf = 1.0 - testkit::oracle_s0(f, p, r[i].time);
    d = std::max({d, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST_CASE("no cure and no censoring reproduces the latency distribution") {
  testkit::Gen g(17);
  for (Family f : kAllFamilies) {
    SimulationConfig cfg;
    cfg.n = 2000;
    cfg.cure_fraction = 0.0;
    cfg.family = f;
    cfg.latency = g.params({f, false}).latency;
    cfg.censoring = Censoring::administrative(std::numeric_limits<double>::infinity());
    cfg.seed = 1000 + static_cast<int>(f);
    auto sim = simulate_mixture(cfg);
    CAPTURE(family_name(f));
    CHECK(sim.sample.n_events() == 2000);
    CHECK(sim.truth.n_cured == 0);
    CHECK(ks_distance(sim.sample, f, cfg.latency) < 0.05);
  }
}

TEST_CASE("everyone cured means everyone censored") {
  SimulationConfig cfg;
  cfg.n = 50;
  cfg.cure_fraction = 1.0;
  cfg.censoring = Censoring::administrative(5.0);
  auto sim = simulate_mixture(cfg);
  CHECK(sim.sample.n_events() == 0);
  CHECK(sim.truth.n_cured == 50);
  for (const auto& r : sim.sample.records()) CHECK(r.time == 5.0);
}

TEST_CASE("share censored beyond six years matches the closed form") {
  SimulationConfig cfg;
  cfg.n = 100000;
  cfg.cure_fraction = 0.4;
  cfg.family = Family::weibull;
  cfg.latency = {0.8, 0.8};
  cfg.censoring = Censoring::administrative(7.3);
  cfg.seed = 6;
  auto sim = simulate_mixture(cfg);
  std::size_t late = 0;
  for (const auto& r : sim.sample.records()) late += (!r.event && r.time > 6.0);
  const double s6 = 0.4 + 0.6 * testkit::oracle_s0(Family::weibull, cfg.latency, 6.0);
  CHECK(std::abs(double(late) / cfg.n - s6 * cfg.censoring.survival(6.0)) < 0.01);
}

TEST_CASE("same seed, same sample; different seed, different sample") {
  auto a = simulate_mixture(testkit::recovery_config(42, 300));
  auto b = simulate_mixture(testkit::recovery_config(42, 300));
  auto c = simulate_mixture(testkit::recovery_config(43, 300));
  CHECK(a.sample == b.sample);
  CHECK_FALSE(a.sample == c.sample);
  CHECK(a.truth.n_events + a.truth.n_censored == 300);
  CHECK(a.truth.n_events == a.sample.n_events());
}

TEST_CASE("censoring mechanisms") {
  CHECK(Censoring::administrative(2.0).survival(1.9) == 1.0);
  CHECK(Censoring::administrative(2.0).survival(2.0) == 0.0);
  CHECK(Censoring::uniform(4.0).survival(1.0) == doctest::Approx(0.75));
  CHECK(Censoring::exponential(0.5).survival(2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(Censoring::composite(7.3, 30.0).survival(6.0) == doctest::Approx(0.8));
  CHECK(Censoring::composite(7.3, 30.0).survival(7.3) == 0.0);
  CHECK_FALSE(Censoring::composite(7.3, 30.0).describe().empty());
}

TEST_CASE("simulation config validation") {
  SimulationConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = {};
  cfg.cure_fraction = 1.5;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = {};
  cfg.latency = {1.0};
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = {};
  cfg.cure_fraction = 0.3;
  cfg.censoring = Censoring::administrative(std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  CHECK_THROWS_AS(simulate_mixture(cfg), ValidationError);
}

TEST_CASE("restricting follow-up") {
  auto s = validate_sample({{0.5, true}, {5.0, true}, {2.0, false}});
  CHECK(restrict_followup(s, 5.0) == s);
  CHECK(restrict_followup(s, 10.0) == s);
  auto cut = restrict_followup(s, 1.0);
  CHECK(cut.records()[0] == Observation{0.5, true});
  CHECK(cut.records()[1] == Observation{1.0, false});
  CHECK(cut.records()[2] == Observation{1.0, false});
  CHECK(cut.n_events() == 1);
  CHECK_THROWS_AS(restrict_followup(s, 0.0), ValidationError);
  CHECK_THROWS_AS(restrict_followup(s, -2.0), ValidationError);
}

TEST_CASE("replicate seeds and the replicate runner") {
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 1000; ++i) seeds.insert(replicate_seed(7, i));
  CHECK(seeds.size() == 1000);
  CHECK(replicate_seed(7, 3) == replicate_seed(7, 3));
  CHECK(replicate_seed(7, 3) != replicate_seed(8, 3));

  auto out = run_replicates(20, 7, [](std::uint64_t seed, std::size_t i) { return std::pair(seed, i); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].first == replicate_seed(7, i));
    CHECK(out[i].second == i);
  }
  CHECK_THROWS_AS(run_replicates(5, 1,
                                 [](std::uint64_t, std::size_t i) -> int {
                                   if (i == 3) throw std::runtime_error("boom");
                                   return 0;
                                 }),
                  std::runtime_error);
}
