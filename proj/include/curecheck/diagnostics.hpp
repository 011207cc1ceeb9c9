#pragma once

// Quantitative follow-up diagnostics.
//
//  * nonparametric cure evidence: p̂ = 1 - KM(Y(n)), the Kaplan-Meier
//    estimate of the uncured probability at the largest observed time.
//  * deviance cure test: d = 2 (ℓ_cure - ℓ_noncure) for one latency family,
//    referred to the boundary mixture ½χ²₀ + ½χ²₁.
//  * alpha_n sufficient-follow-up test: N = number of events in
//    (2 Y*(n) - Y(n), Y*(n)], statistic (1 - N/n)^n, follow-up judged
//    sufficient when it falls below the threshold. The right endpoint Y*(n)
//    is itself an event and is counted.

#include <cstddef>
#include <optional>
#include <string>

#include "curecheck/models.hpp"
#include "curecheck/survival.hpp"

namespace curecheck {

struct CureFractionEvidence {
  double p_hat = 1.0;              // estimated uncured probability
  double cure_fraction_hat = 0.0;  // 1 - p_hat
  std::optional<double> deviance;
  std::optional<double> deviance_p_value;
  std::string diagnostic;
};

CureFractionEvidence nonparametric_cure_evidence(const SurvivalSample& sample);

// Fits the cure and non-cure spec of `family`. When either fit fails to
// converge the deviance fields are absent and `diagnostic` says why.
CureFractionEvidence deviance_cure_test(const SurvivalSample& sample, Family family,
                                        const FitOptions& options = {});

// p-value of d under ½χ²₀ + ½χ²₁. Equals 0.5 at d = 0.
double deviance_p_value(double deviance);

struct FollowUpTest {
  double y_max = 0.0;
  double y_max_event = 0.0;
  double interval_lower = 0.0;  // open
  double interval_upper = 0.0;  // closed
  std::size_t n = 0;
  std::size_t n_n = 0;
  double alpha_n = 1.0;
  double threshold = 0.05;
  bool sufficient_followup = false;
};

double alpha_n_statistic(std::size_t n_n, std::size_t n);

// Throws AssessmentError when the sample has no events.
FollowUpTest alpha_n_test(const SurvivalSample& sample, double threshold = 0.05);

}  // namespace curecheck
