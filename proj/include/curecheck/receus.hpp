#pragma once

// Cure-model appropriateness assessment.
//
// Steps:
//   (i)   fit cure and non-cure specs of every configured family and select
//         the minimum-AIC converged fit; a non-cure winner ends the
//         assessment as "not appropriate".
//   (ii)  from the selected cure fit take the cure fraction c, S0(τ) and
//         S(τ) = c + (1 - c) S0(τ).
//   (iii) c must exceed the cure-fraction threshold (default 0.025).
//   (iv)  r = S0(τ) / S(τ), the estimated share of uncured among those still
//         event-free at τ, must fall below the r threshold (default 0.05).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curecheck/diagnostics.hpp"
#include "curecheck/models.hpp"
#include "curecheck/parallel.hpp"
#include "curecheck/survival.hpp"

namespace curecheck {

struct AssessmentConfig {
  std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
  double cure_fraction_threshold = 0.025;
  double r_threshold = 0.05;
  double alpha_threshold = 0.05;
  std::optional<double> tau;          // defaults to the maximum observed time
  std::optional<double> late_window;  // defaults to 20% of maximum follow-up
  FitOptions fit;
  Execution execution = Execution::parallel;
};

// Throws ValidationError on out-of-range thresholds, non-positive tau or an
// empty/duplicated family list.
void validate_config(const AssessmentConfig& config);

struct ModelSelection {
  // Two rows per family in family order, non-cure first. Specs that could
  // not be fitted carry converged = false and a diagnostic.
  std::vector<ModelFit> fits;
  std::size_t selected = 0;
  // True when a lower-AIC fit was skipped because it did not converge.
  bool substituted = false;
  std::string note;

  const ModelFit& best() const { return fits[selected]; }
};

// Selection order: lower AIC; within 1e-12 AIC, fewer parameters, then the
// earlier family in kAllFamilies order.
bool aic_preferred(const ModelFit& a, const ModelFit& b);

// Minimum AIC among converged fits. Fits within 1e-12 AIC are tied and go to
// the spec with fewer parameters, then to the earlier family.
ModelSelection select_model_by_aic(const SurvivalSample& sample, const std::vector<Family>& families,
                                   const FitOptions& options = {},
                                   Execution execution = Execution::parallel);

struct ReceusRatio {
  double s0_at_tau = 1.0;
  double s_at_tau = 1.0;
  double r_hat = 1.0;
};

// Throws AssessmentError for a non-cure fit and ValidationError for tau < 0.
ReceusRatio receus_ratio(const ModelFit& fit, double tau);

enum class Verdict {
  appropriate,
  not_appropriate_noncure_selected,
  not_appropriate_small_cure_fraction,
  not_appropriate_insufficient_followup,
};

std::string_view verdict_name(Verdict v);
Verdict decide_verdict(bool cure_model_selected, bool cure_fraction_pass, bool r_pass);

struct CureAssessment {
  ModelSelection selection;
  bool cure_model_selected = false;
  // The cure fit the ratio fields come from: the selected fit when it is a
  // cure spec, otherwise the best converged cure spec.
  std::optional<ModelFit> cure_fit;
  double tau = 0.0;
  double cure_fraction = 0.0;
  double s0_at_tau = 1.0;
  double s_at_tau = 1.0;
  double r_hat = 1.0;
  bool cure_fraction_pass = false;
  bool r_pass = false;
  Verdict verdict = Verdict::not_appropriate_noncure_selected;
  FollowUpSummary summary;
  FollowUpTest followup_test;
  CureFractionEvidence nonparametric;
  std::vector<std::string> notes;
};

CureAssessment receus_assess(const SurvivalSample& sample, const AssessmentConfig& config = {});

}  // namespace curecheck
