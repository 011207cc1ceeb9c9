#include "curecheck/receus.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <fmt/format.h>

#include "curecheck/errors.hpp"

namespace curecheck {

namespace {

constexpr double kAicTie = 1e-12;

ModelFit unfitted(const SurvivalSample& sample, const FamilySpec& spec, const std::string& why) {
  ModelFit f;
  f.spec = spec;
  f.k = spec.n_params();
  f.n = sample.size();
  f.n_events = sample.n_events();
  f.log_likelihood = -std::numeric_limits<double>::infinity();
  f.aic = std::numeric_limits<double>::infinity();
  f.converged = false;
  f.diagnostic = why;
  return f;
}

ModelFit fit_or_flag(const SurvivalSample& sample, const FamilySpec& spec, const FitOptions& options) {
  try {
    return fit_model(sample, spec, options);
  } catch (const DomainError& e) {
    return unfitted(sample, spec, e.what());
  } catch (const AssessmentError& e) {  // too few records for this spec
    return unfitted(sample, spec, e.what());
  }
}

}  // namespace

bool aic_preferred(const ModelFit& a, const ModelFit& b) {
  if (a.aic < b.aic - kAicTie) return true;
  if (a.aic > b.aic + kAicTie) return false;
  if (a.k != b.k) return a.k < b.k;
  return a.spec.family < b.spec.family;
}

void validate_config(const AssessmentConfig& config) {
  const auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(config.cure_fraction_threshold)) {
    throw ValidationError("cure fraction threshold must be in (0, 1)");
  }
  if (!in_unit(config.r_threshold)) throw ValidationError("r threshold must be in (0, 1)");
  if (!in_unit(config.alpha_threshold)) throw ValidationError("alpha threshold must be in (0, 1)");
  if (config.tau && !(*config.tau > 0.0 && std::isfinite(*config.tau))) {
    throw ValidationError("tau must be positive");
  }
  if (config.families.empty()) throw ValidationError("at least one family is required");
  for (std::size_t i = 0; i < config.families.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.families[i] == config.families[j]) {
        throw ValidationError(fmt::format("family '{}' listed twice", family_name(config.families[i])));
      }
    }
  }
}

ModelSelection select_model_by_aic(const SurvivalSample& sample, const std::vector<Family>& families,
                                   const FitOptions& options, Execution execution) {
  if (sample.n_events() == 0) throw AssessmentError("no events: fitting undefined");

  std::vector<FamilySpec> specs;
  for (Family f : families) {
    specs.push_back({f, false});
    specs.push_back({f, true});
  }

  ModelSelection sel;
  sel.fits.resize(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const auto count = static_cast<long>(specs.size());
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
      try {
        sel.fits[i] = fit_or_flag(sample, specs[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < count; ++i) {
      try {
        sel.fits[i] = fit_or_flag(sample, specs[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::optional<std::size_t> best;
  std::optional<std::size_t> best_any;
  for (std::size_t i = 0; i < sel.fits.size(); ++i) {
    const auto& f = sel.fits[i];
    if (std::isfinite(f.aic) && (!best_any || aic_preferred(f, sel.fits[*best_any]))) best_any = i;
    if (f.converged && (!best || aic_preferred(f, sel.fits[*best]))) best = i;
  }
  if (!best) throw AssessmentError("no model converged");
  sel.selected = *best;
  if (best_any && *best_any != *best) {
    sel.substituted = true;
    sel.note = fmt::format("{} had the lowest AIC but did not converge; using {}",
                           sel.fits[*best_any].spec.label(), sel.fits[*best].spec.label());
  }
  return sel;
}

ReceusRatio receus_ratio(const ModelFit& fit, double tau) {
  if (!fit.spec.cure) throw AssessmentError("the uncured-among-survivors ratio needs a cure model fit");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be nonnegative");
  ReceusRatio r;
  const double c = fit.params.cure_fraction.value();
  r.s0_at_tau = latency_survival(fit.spec, fit.params, tau);
  r.s_at_tau = c + (1.0 - c) * r.s0_at_tau;
  r.r_hat = r.s0_at_tau / r.s_at_tau;
  return r;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::appropriate:
      return "appropriate";
    case Verdict::not_appropriate_noncure_selected:
      return "not_appropriate_noncure_selected";
    case Verdict::not_appropriate_small_cure_fraction:
      return "not_appropriate_small_cure_fraction";
    case Verdict::not_appropriate_insufficient_followup:
      return "not_appropriate_insufficient_followup";
  }
  return "unknown";
}

Verdict decide_verdict(bool cure_model_selected, bool cure_fraction_pass, bool r_pass) {
  if (!cure_model_selected) return Verdict::not_appropriate_noncure_selected;
  if (!cure_fraction_pass) return Verdict::not_appropriate_small_cure_fraction;
  if (!r_pass) return Verdict::not_appropriate_insufficient_followup;
  return Verdict::appropriate;
}

CureAssessment receus_assess(const SurvivalSample& sample, const AssessmentConfig& config) {
  validate_config(config);
  if (sample.n_events() == 0) throw AssessmentError("no events: fitting undefined");

  CureAssessment out;
  out.summary = followup_summary(sample, config.late_window);
  out.followup_test = alpha_n_test(sample, config.alpha_threshold);
  out.nonparametric = nonparametric_cure_evidence(sample);
  out.tau = config.tau.value_or(sample.max_time());

  out.selection = select_model_by_aic(sample, config.families, config.fit, config.execution);
  if (out.selection.substituted) out.notes.push_back(out.selection.note);
  const ModelFit& best = out.selection.best();
  out.cure_model_selected = best.spec.cure;

  if (out.cure_model_selected) {
    out.cure_fit = best;
  } else {
    const ModelFit* cure_best = nullptr;
    for (const auto& f : out.selection.fits) {
      if (f.spec.cure && f.converged && (!cure_best || f.aic < cure_best->aic)) cure_best = &f;
    }
    if (cure_best) {
      out.cure_fit = *cure_best;
      out.notes.push_back(fmt::format("non-cure model selected; cure fields reported from {}",
                                      cure_best->spec.label()));
    } else {
      out.notes.push_back("non-cure model selected; no cure model converged");
    }
  }

  if (out.cure_fit) {
    const auto ratio = receus_ratio(*out.cure_fit, out.tau);
    out.cure_fraction = out.cure_fit->params.cure_fraction.value();
    out.s0_at_tau = ratio.s0_at_tau;
    out.s_at_tau = ratio.s_at_tau;
    out.r_hat = ratio.r_hat;
    out.cure_fraction_pass = out.cure_fraction > config.cure_fraction_threshold;
    out.r_pass = out.r_hat < config.r_threshold;
  }
  out.verdict = decide_verdict(out.cure_model_selected, out.cure_fraction_pass, out.r_pass);
  if (out.verdict == Verdict::not_appropriate_small_cure_fraction) {
    out.notes.push_back(
        "estimated cure fraction is small: either a cure model is not valid here or follow-up is "
        "too short to show the plateau");
  }
  if (out.followup_test.sufficient_followup != (out.verdict == Verdict::appropriate)) {
    out.notes.push_back(fmt::format(
        "alpha_n test ({}) and the ratio-based verdict ({}) disagree",
        out.followup_test.sufficient_followup ? "sufficient follow-up" : "insufficient follow-up",
        verdict_name(out.verdict)));
  }
  return out;
}

}  // namespace curecheck
