#include "curecheck/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "curecheck/errors.hpp"
#include "curecheck/special_functions.hpp"

namespace curecheck {

namespace {

// Optimizer noise below this is clamped silently; anything larger is
// reported in the diagnostic.
constexpr double kDevianceNoise = 1e-6;

}  // namespace

CureFractionEvidence nonparametric_cure_evidence(const SurvivalSample& sample) {
  CureFractionEvidence ev;
  ev.cure_fraction_hat = km_survival_at(kaplan_meier(sample), sample.max_time());
  ev.p_hat = 1.0 - ev.cure_fraction_hat;
  return ev;
}

double deviance_p_value(double deviance) {
  if (deviance <= 0.0) return 0.5;
  return 0.5 * special::chisq1_sf(deviance);
}

CureFractionEvidence deviance_cure_test(const SurvivalSample& sample, Family family,
                                        const FitOptions& options) {
  CureFractionEvidence ev = nonparametric_cure_evidence(sample);
  FitOptions opt = options;
  opt.standard_errors = false;
  const ModelFit noncure = fit_model(sample, {family, false}, opt);
  const ModelFit cure = fit_model(sample, {family, true}, opt);
  if (!noncure.converged || !cure.converged) {
    ev.diagnostic = fmt::format("deviance test unavailable: {} fit did not converge",
                                !noncure.converged ? noncure.spec.label() : cure.spec.label());
    return ev;
  }
  const double raw = 2.0 * (cure.log_likelihood - noncure.log_likelihood);
  if (raw < -kDevianceNoise) {
    ev.diagnostic = fmt::format("cure fit below non-cure fit by {:.3g} in deviance; clamped to 0", -raw);
  }
  ev.deviance = std::max(raw, 0.0);
  ev.deviance_p_value = deviance_p_value(*ev.deviance);
  return ev;
}

double alpha_n_statistic(std::size_t n_n, std::size_t n) {
  if (n == 0) return 1.0;
  const double frac = static_cast<double>(n_n) / static_cast<double>(n);
  return std::pow(1.0 - frac, static_cast<double>(n));
}

FollowUpTest alpha_n_test(const SurvivalSample& sample, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError(fmt::format("alpha_n threshold must be in (0, 1), got {}", threshold));
  }
  const auto y_star = sample.max_event_time();
  if (!y_star) throw AssessmentError("no events: the alpha_n test is undefined");

  FollowUpTest out;
  out.y_max = sample.max_time();
  out.y_max_event = *y_star;
  out.interval_lower = 2.0 * out.y_max_event - out.y_max;
  out.interval_upper = out.y_max_event;
  out.n = sample.size();
  out.threshold = threshold;
  // The left end carries rounding from 2Y* - Y; an event within a few ulps
  // of it counts as sitting on the (open) boundary, so rescaling the time
  // axis cannot move it in or out.
  const double edge = out.interval_lower + 8.0 * std::numeric_limits<double>::epsilon() * out.y_max;
  for (const auto& r : sample.records()) {
    if (r.event && r.time > edge && r.time <= out.interval_upper) ++out.n_n;
  }
  out.alpha_n = alpha_n_statistic(out.n_n, out.n);
  out.sufficient_followup = out.alpha_n < threshold;
  return out;
}

}  // namespace curecheck
