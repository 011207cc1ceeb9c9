#pragma once

// Parametric latency families, mixture cure likelihoods and maximum
// likelihood fitting.
//
// Latency parameterizations (S0 is the survivor function of susceptibles):
//
//   exponential  {rate}            S0(t) = exp(-rate t)
//   weibull      {shape, scale}    S0(t) = exp(-(t/scale)^shape)
//   gamma        {shape, rate}     S0(t) = Q(shape, rate t)
//   loglogistic  {shape, scale}    S0(t) = 1 / (1 + (t/scale)^shape)
//   lognormal    {meanlog, sdlog}  S0(t) = 1 - Φ((ln t - meanlog) / sdlog)
//
// A cure spec adds a cure fraction c in (0, 1) and has population survival
// S(t) = c + (1 - c) S0(t).
//
// Fitting is done on an unconstrained scale: logit for the cure fraction,
// log for every positive latency parameter, identity for meanlog.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curecheck/survival.hpp"

namespace curecheck {

enum class Family { exponential, weibull, gamma, loglogistic, lognormal };

// Ordered as in the usual comparison table; selection tie-breaks use this order.
inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::exponential, Family::weibull, Family::gamma, Family::loglogistic, Family::lognormal};

std::string_view family_name(Family f);
Family parse_family(std::string_view name);  // throws ValidationError
int latency_param_count(Family f);

struct FamilySpec {
  Family family = Family::weibull;
  bool cure = false;

  int n_params() const { return latency_param_count(family) + (cure ? 1 : 0); }
  std::string label() const;  // e.g. "weibull cure", "gamma non-cure"

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

struct Params {
  std::optional<double> cure_fraction;  // present iff the spec is a cure spec
  std::vector<double> latency;
};

// Throws DomainError when params do not match the spec or leave the domain.
void check_params(const FamilySpec& spec, const Params& params);

// Names in unconstrained-vector order, e.g. {"cure_fraction", "shape", "scale"}.
std::vector<std::string> parameter_names(const FamilySpec& spec);
// Natural-scale values in the same order.
std::vector<double> parameter_values(const FamilySpec& spec, const Params& params);

std::vector<double> to_unconstrained(const FamilySpec& spec, const Params& params);
Params from_unconstrained(const FamilySpec& spec, std::span<const double> theta);

double latency_survival(const FamilySpec& spec, const Params& params, double t);
double latency_density(const FamilySpec& spec, const Params& params, double t);
double population_survival(const FamilySpec& spec, const Params& params, double t);

// Inverse of the latency CDF: the t with 1 - S0(t) = u, u in (0, 1).
double latency_quantile(Family family, std::span<const double> latency, double u);

// Σ δ log f(y) + (1 - δ) log S(y), with f = (1 - c) f0 for cure specs.
double log_likelihood(const FamilySpec& spec, const Params& params, const SurvivalSample& sample);

struct FitOptions {
  double objective_tolerance = 1e-9;
  double parameter_tolerance = 1e-7;  // simplex size on the unconstrained scale
  int max_iterations = 5000;          // per simplex run
  int max_restarts = 3;
  bool standard_errors = true;
  double hessian_step = 1e-4;
};

struct ModelFit {
  FamilySpec spec;
  Params params;
  std::vector<double> unconstrained;  // params on the fitting scale
  double log_likelihood = 0.0;
  double aic = 0.0;
  int k = 0;
  std::size_t n = 0;
  std::size_t n_events = 0;
  bool converged = false;
  int iterations = 0;
  // Standard errors on the unconstrained scale, from the inverse observed
  // information. Absent when the Hessian is not negative definite.
  std::optional<std::vector<double>> standard_errors;
  std::string diagnostic;
};

// Throws AssessmentError when the sample has no events or n < k + 1, and
// DomainError for events at time zero under a family whose density is not
// finite there. Non-convergence is reported through ModelFit::converged.
ModelFit fit_model(const SurvivalSample& sample, const FamilySpec& spec,
                   const FitOptions& options = {});

// The deterministic starting point used by fit_model.
Params initial_params(const SurvivalSample& sample, const FamilySpec& spec);

double aic(double log_likelihood, int k);
double aic(const ModelFit& fit);

struct WaldInterval {
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double se = 0.0;  // unconstrained scale
  double estimate_unconstrained = 0.0;
  double lower_unconstrained = 0.0;
  double upper_unconstrained = 0.0;
};

// Symmetric intervals on the unconstrained scale mapped back to the natural
// scale. Absent when the fit carries no standard errors (see fit.diagnostic).
std::optional<std::vector<WaldInterval>> wald_intervals(const ModelFit& fit, double level = 0.95);

}  // namespace curecheck
