#include <doctest.h>

#include <cmath>

#include "curecheck/errors.hpp"
#include "curecheck/receus.hpp"
#include "curecheck/simulate.hpp"
#include "support.hpp"

using namespace curecheck;

namespace {

ModelFit fixed_fit(FamilySpec spec, Params params, double ll = -100.0) {
  ModelFit f;
  f.spec = spec;
  f.params = std::move(params);
  f.k = spec.n_params();
  f.log_likelihood = ll;
  f.aic = aic(ll, f.k);
  f.converged = true;
  return f;
}

const ModelFit kReferenceFit = fixed_fit({Family::weibull, true}, {0.3976, {0.8133, 0.8052}}, -265.9932);

}  // namespace

TEST_CASE("ratio for a fitted Weibull cure model at tau = 7.28") {
  const auto r = receus_ratio(kReferenceFit, 7.28);
  CHECK(std::abs(r.s0_at_tau - 0.00249) < 5e-5);
  CHECK(std::abs(r.s_at_tau - 0.3991) < 5e-4);
  CHECK(std::abs(r.r_hat - 0.00625) < 1e-4);
  CHECK(kReferenceFit.aic == doctest::Approx(537.9864).epsilon(1e-6));
  CHECK(decide_verdict(true, 0.3976 > 0.025, r.r_hat < 0.05) == Verdict::appropriate);
}

TEST_CASE("ratio edge cases") {
  const auto zero = receus_ratio(kReferenceFit, 0.0);
  CHECK(zero.s0_at_tau == 1.0);
  CHECK(zero.s_at_tau == 1.0);
  CHECK(zero.r_hat == 1.0);

  const auto nearly_all_cured = fixed_fit({Family::weibull, true}, {0.999999, {0.8133, 0.8052}});
  const auto r = receus_ratio(nearly_all_cured, 1.0);
  CHECK(r.r_hat == doctest::Approx(r.s0_at_tau).epsilon(1e-4));

  CHECK_THROWS_AS(receus_ratio(fixed_fit({Family::weibull, false}, {std::nullopt, {1, 1}}), 1.0), AssessmentError);
  CHECK_THROWS_AS(receus_ratio(kReferenceFit, -1.0), ValidationError);
}

TEST_CASE("verdict truth table") {
  for (int mask = 0; mask < 8; ++mask) {
    const bool sel = mask & 1, cf = mask & 2, r = mask & 4;
    const auto v = decide_verdict(sel, cf, r);
    CHECK((v == Verdict::appropriate) == (sel && cf && r));
    if (!sel) CHECK(v == Verdict::not_appropriate_noncure_selected);
    if (sel && !cf) CHECK(v == Verdict::not_appropriate_small_cure_fraction);
    if (sel && cf && !r) CHECK(v == Verdict::not_appropriate_insufficient_followup);
  }
  CHECK(verdict_name(Verdict::appropriate) == "appropriate");
}

TEST_CASE("AIC ties go to fewer parameters, then earlier family") {
  auto a = fixed_fit({Family::weibull, true}, {0.3, {1, 1}});
  auto b = fixed_fit({Family::weibull, false}, {std::nullopt, {1, 1}});
  a.aic = 100.0;
  b.aic = 100.0 + 5e-13;
  CHECK(aic_preferred(b, a));
  CHECK_FALSE(aic_preferred(a, b));
  b.aic = 100.0 + 1e-9;
  CHECK(aic_preferred(a, b));

  auto c = fixed_fit({Family::gamma, false}, {std::nullopt, {1, 1}});
  auto d = fixed_fit({Family::exponential, true}, {0.3, {1}});
  c.aic = d.aic = 50.0;
  CHECK(aic_preferred(d, c));
}

TEST_CASE("config validation") {
  AssessmentConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.cure_fraction_threshold = 0.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = {};
  c.r_threshold = 1.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = {};
  c.tau = 0.0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = {};
  c.families = {};
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c.families = {Family::gamma, Family::gamma};
  CHECK_THROWS_AS(validate_config(c), ValidationError);
}

TEST_CASE("assessment on well-followed cure data") {
  auto sim = simulate_mixture(testkit::recovery_config(314));
  auto a = receus_assess(sim.sample);
  CHECK(a.selection.fits.size() == 10);
  CHECK(a.cure_model_selected);
  CHECK(a.verdict == Verdict::appropriate);
  CHECK(a.tau == sim.sample.max_time());
  CHECK(a.s_at_tau == doctest::Approx(a.cure_fraction + (1 - a.cure_fraction) * a.s0_at_tau).epsilon(1e-12));
  CHECK(a.r_hat == doctest::Approx(a.s0_at_tau / a.s_at_tau).epsilon(1e-12));
  CHECK(a.followup_test.n == 1000);
  CHECK(a.nonparametric.cure_fraction_hat == a.summary.km_at_max);
}

TEST_CASE("assessment rejects samples without events") {
  CHECK_THROWS_WITH_AS(receus_assess(validate_sample({{1, false}, {2, false}})), "no events: fitting undefined",
                       AssessmentError);
}

TEST_CASE("model table keeps a row for every spec, including unfittable ones") {
  // an event at 0 rules out every family but the exponential
  auto s = validate_sample({{0.0, true}, {0.5, true}, {1.0, true}, {1.5, false}, {2.0, true}, {3.0, false}});
  auto sel = select_model_by_aic(s, {kAllFamilies.begin(), kAllFamilies.end()});
  CHECK(sel.fits.size() == 10);
  int unfitted = 0;
  for (const auto& f : sel.fits) {
    if (!f.converged) {
      ++unfitted;
      CHECK_FALSE(f.diagnostic.empty());
      CHECK(std::isinf(f.aic));
    }
  }
  CHECK(unfitted == 8);
  CHECK(sel.best().spec.family == Family::exponential);
}

TEST_CASE("proper exponential data with heavy early censoring selects a non-cure model") {
  int noncure = 0;
  const int reps = 100;
  for (int i = 0; i < reps; ++i) {
    SimulationConfig cfg;
    cfg.n = 500;
    cfg.cure_fraction = 0.0;
    cfg.family = Family::exponential;
    cfg.latency = {1.0};
    cfg.censoring = Censoring::exponential(1.0);
    cfg.seed = replicate_seed(2718, i);
    auto sim = simulate_mixture(cfg);
    FitOptions fast;
    fast.standard_errors = false;
    if (!select_model_by_aic(sim.sample, {kAllFamilies.begin(), kAllFamilies.end()}, fast).best().spec.cure) {
      ++noncure;
    }
  }
  MESSAGE("non-cure selected in " << noncure << " of " << reps);
  CHECK(noncure >= 80);
}

TEST_CASE("cure data truncated to a tenth of the latency support is not appropriate") {
  int flagged = 0;
  const int reps = 100;
  for (int i = 0; i < reps; ++i) {
    auto cfg = testkit::recovery_config(replicate_seed(161, i), 1000);
    auto sim = simulate_mixture(cfg);
    const double support = latency_quantile(Family::weibull, cfg.latency, 0.999);
    AssessmentConfig ac;
    ac.fit.standard_errors = false;
    if (receus_assess(restrict_followup(sim.sample, 0.1 * support), ac).verdict != Verdict::appropriate) ++flagged;
  }
  MESSAGE("not appropriate in " << flagged << " of " << reps);
  CHECK(flagged >= 80);
}
