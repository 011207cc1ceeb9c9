#include "curecheck/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "curecheck/errors.hpp"
#include "curecheck/optimizer.hpp"
#include "curecheck/special_functions.hpp"

namespace curecheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogitBound = 20.0;
constexpr double kLogBound = 30.0;

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// Latency family with per-evaluation constants hoisted out of the record loop.
class Latency {
 public:
  Latency(Family f, std::span<const double> p) : family_(f), a_(p[0]), b_(p.size() > 1 ? p[1] : 0.0) {
    switch (family_) {
      case Family::exponential:
        log_a_ = std::log(a_);
        break;
      case Family::weibull:
      case Family::loglogistic:
        log_a_ = std::log(a_);
        log_b_ = std::log(b_);
        break;
      case Family::gamma:
        log_b_ = std::log(b_);
        lgamma_a_ = special::log_gamma(a_);
        break;
      case Family::lognormal:
        log_b_ = std::log(b_);
        break;
    }
  }

  // log f0(t); log_t is log(t) supplied by the caller.
  double log_density(double t, double log_t) const {
    switch (family_) {
      case Family::exponential:
        return log_a_ - a_ * t;
      case Family::weibull: {
        const double u = log_t - log_b_;
        return log_a_ - log_b_ + (a_ - 1.0) * u - std::exp(a_ * u);
      }
      case Family::gamma:
        return a_ * log_b_ + (a_ - 1.0) * log_t - b_ * t - lgamma_a_;
      case Family::loglogistic: {
        const double u = log_t - log_b_;
        return log_a_ - log_b_ + (a_ - 1.0) * u - 2.0 * std::log1p(std::exp(a_ * u));
      }
      case Family::lognormal: {
        const double z = (log_t - a_) / b_;
        return -log_t - log_b_ - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double log_survival(double t, double log_t) const {
    if (t <= 0.0) return 0.0;
    switch (family_) {
      case Family::exponential:
        return -a_ * t;
      case Family::weibull:
        return -std::exp(a_ * (log_t - log_b_));
      case Family::gamma:
        return special::log_gamma_q(a_, b_ * t);
      case Family::loglogistic:
        return -std::log1p(std::exp(a_ * (log_t - log_b_)));
      case Family::lognormal:
        return special::log_normal_sf((log_t - a_) / b_);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  Family family_;
  double a_;
  double b_;
  double log_a_ = 0.0;
  double log_b_ = 0.0;
  double lgamma_a_ = 0.0;
};

// Records collapsed over tied times.
struct TimeGroup {
  double time;
  double log_time;
  double events;
  double censored;
};

std::vector<TimeGroup> group_times(const SurvivalSample& sample) {
  std::vector<TimeGroup> groups;
  for (const auto& r : sample.records()) {
    if (groups.empty() || groups.back().time != r.time) {
      groups.push_back({r.time, std::log(r.time), 0.0, 0.0});
    }
    (r.event ? groups.back().events : groups.back().censored) += 1.0;
  }
  return groups;
}

bool density_finite_at_zero(Family f) { return f == Family::exponential; }

void check_zero_events(const SurvivalSample& sample, Family f) {
  if (density_finite_at_zero(f)) return;
  const auto rec = sample.records();
  for (std::size_t i = 0; i < rec.size() && rec[i].time == 0.0; ++i) {
    if (rec[i].event) {
      throw DomainError(fmt::format(
          "event at time 0 is outside the domain of the {} density", family_name(f)));
    }
  }
}

double grouped_log_likelihood(const FamilySpec& spec, const Params& params,
                              std::span<const TimeGroup> groups) {
  const Latency lat(spec.family, params.latency);
  double total = 0.0;
  if (!spec.cure) {
    for (const auto& g : groups) {
      if (g.events > 0.0) total += g.events * lat.log_density(g.time, g.log_time);
      if (g.censored > 0.0) total += g.censored * lat.log_survival(g.time, g.log_time);
    }
    return total;
  }
  const double c = *params.cure_fraction;
  const double p = 1.0 - c;
  const double log_p = std::log(p);
  for (const auto& g : groups) {
    if (g.events > 0.0) total += g.events * (log_p + lat.log_density(g.time, g.log_time));
    if (g.censored > 0.0) {
      total += g.censored * std::log(c + p * std::exp(lat.log_survival(g.time, g.log_time)));
    }
  }
  return total;
}

std::vector<double> lower_bounds(const FamilySpec& spec) {
  std::vector<double> lo;
  if (spec.cure) lo.push_back(-kLogitBound);
  for (int i = 0; i < latency_param_count(spec.family); ++i) {
    lo.push_back(spec.family == Family::lognormal && i == 0 ? -kInf : -kLogBound);
  }
  return lo;
}

std::vector<double> upper_bounds(const FamilySpec& spec) {
  std::vector<double> hi;
  if (spec.cure) hi.push_back(kLogitBound);
  for (int i = 0; i < latency_param_count(spec.family); ++i) {
    hi.push_back(spec.family == Family::lognormal && i == 0 ? kInf : kLogBound);
  }
  return hi;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::exponential:
      return "exponential";
    case Family::weibull:
      return "weibull";
    case Family::gamma:
      return "gamma";
    case Family::loglogistic:
      return "loglogistic";
    case Family::lognormal:
      return "lognormal";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  if (name == "exp") return Family::exponential;
  if (name == "llogis" || name == "log-logistic") return Family::loglogistic;
  if (name == "lnorm" || name == "log-normal") return Family::lognormal;
  throw ValidationError(fmt::format("unknown family '{}'", name));
}

int latency_param_count(Family f) { return f == Family::exponential ? 1 : 2; }

std::string FamilySpec::label() const {
  return fmt::format("{} {}", family_name(family), cure ? "cure" : "non-cure");
}

void check_params(const FamilySpec& spec, const Params& params) {
  if (spec.cure != params.cure_fraction.has_value()) {
    throw DomainError(spec.cure ? "cure spec requires a cure fraction"
                                : "non-cure spec must not carry a cure fraction");
  }
  if (spec.cure) {
    const double c = *params.cure_fraction;
    if (!(c > 0.0 && c < 1.0)) {
      throw DomainError(fmt::format("cure fraction {} is outside (0, 1)", c));
    }
  }
  const auto expected = static_cast<std::size_t>(latency_param_count(spec.family));
  if (params.latency.size() != expected) {
    throw DomainError(fmt::format("{} expects {} latency parameters, got {}",
                                  family_name(spec.family), expected, params.latency.size()));
  }
  for (std::size_t i = 0; i < expected; ++i) {
    const double v = params.latency[i];
    const bool unconstrained = spec.family == Family::lognormal && i == 0;
    if (unconstrained ? !std::isfinite(v) : !positive_finite(v)) {
      throw DomainError(fmt::format("{} parameter '{}' = {} is outside its domain",
                                    family_name(spec.family), parameter_names(spec)[i + (spec.cure ? 1 : 0)], v));
    }
  }
}

std::vector<std::string> parameter_names(const FamilySpec& spec) {
  std::vector<std::string> names;
  if (spec.cure) names.emplace_back("cure_fraction");
  switch (spec.family) {
    case Family::exponential:
      names.emplace_back("rate");
      break;
    case Family::weibull:
    case Family::loglogistic:
      names.emplace_back("shape");
      names.emplace_back("scale");
      break;
    case Family::gamma:
      names.emplace_back("shape");
      names.emplace_back("rate");
      break;
    case Family::lognormal:
      names.emplace_back("meanlog");
      names.emplace_back("sdlog");
      break;
  }
  return names;
}

std::vector<double> parameter_values(const FamilySpec& spec, const Params& params) {
  std::vector<double> v;
  if (spec.cure) v.push_back(params.cure_fraction.value());
  v.insert(v.end(), params.latency.begin(), params.latency.end());
  return v;
}

std::vector<double> to_unconstrained(const FamilySpec& spec, const Params& params) {
  std::vector<double> theta;
  if (spec.cure) theta.push_back(logit(params.cure_fraction.value()));
  for (std::size_t i = 0; i < params.latency.size(); ++i) {
    const bool identity = spec.family == Family::lognormal && i == 0;
    theta.push_back(identity ? params.latency[i] : std::log(params.latency[i]));
  }
  return theta;
}

Params from_unconstrained(const FamilySpec& spec, std::span<const double> theta) {
  Params p;
  std::size_t j = 0;
  if (spec.cure) p.cure_fraction = inv_logit(theta[j++]);
  for (int i = 0; i < latency_param_count(spec.family); ++i, ++j) {
    const bool identity = spec.family == Family::lognormal && i == 0;
    p.latency.push_back(identity ? theta[j] : std::exp(theta[j]));
  }
  return p;
}

double latency_survival(const FamilySpec& spec, const Params& params, double t) {
  check_params(spec, params);
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  if (t == 0.0) return 1.0;
  return std::exp(Latency(spec.family, params.latency).log_survival(t, std::log(t)));
}

double latency_density(const FamilySpec& spec, const Params& params, double t) {
  check_params(spec, params);
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  return std::exp(Latency(spec.family, params.latency).log_density(t, std::log(t)));
}

double population_survival(const FamilySpec& spec, const Params& params, double t) {
  const double s0 = latency_survival(spec, params, t);
  if (!spec.cure) return s0;
  const double c = *params.cure_fraction;
  return c + (1.0 - c) * s0;
}

double latency_quantile(Family family, std::span<const double> latency, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must be in (0, 1)");
  const double a = latency[0];
  switch (family) {
    case Family::exponential:
      return -std::log1p(-u) / a;
    case Family::weibull:
      return latency[1] * std::pow(-std::log1p(-u), 1.0 / a);
    case Family::gamma:
      return special::gamma_p_inverse(a, u) / latency[1];
    case Family::loglogistic:
      return latency[1] * std::pow(u / (1.0 - u), 1.0 / a);
    case Family::lognormal:
      return std::exp(a + latency[1] * special::normal_quantile(u));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double log_likelihood(const FamilySpec& spec, const Params& params, const SurvivalSample& sample) {
  check_params(spec, params);
  check_zero_events(sample, spec.family);
  const auto groups = group_times(sample);
  return grouped_log_likelihood(spec, params, groups);
}

Params initial_params(const SurvivalSample& sample, const FamilySpec& spec) {
  double sum = 0.0;
  double sum_log = 0.0;
  double sum_log2 = 0.0;
  std::size_t d = 0;
  for (const auto& r : sample.records()) {
    if (!r.event) continue;
    ++d;
    sum += r.time;
    if (r.time > 0.0) {
      const double lt = std::log(r.time);
      sum_log += lt;
      sum_log2 += lt * lt;
    }
  }
  if (d == 0) throw AssessmentError("no events: fitting undefined");
  double mean = sum / static_cast<double>(d);
  if (!(mean > 0.0)) mean = sample.max_time() > 0.0 ? sample.max_time() : 1.0;

  Params p;
  if (spec.cure) {
    const double plateau = km_survival_at(kaplan_meier(sample), sample.max_time());
    p.cure_fraction = std::clamp(plateau, 0.01, 0.99);
  }
  switch (spec.family) {
    case Family::exponential:
      p.latency = {1.0 / mean};
      break;
    case Family::weibull:
    case Family::loglogistic:
      p.latency = {1.0, mean};
      break;
    case Family::gamma:
      p.latency = {1.0, 1.0 / mean};
      break;
    case Family::lognormal: {
      const double m = sum_log / static_cast<double>(d);
      const double var = d > 1 ? (sum_log2 - d * m * m) / static_cast<double>(d - 1) : 0.0;
      const double sd = var > 1e-6 ? std::sqrt(var) : 1.0;
      p.latency = {m, sd};
      break;
    }
  }
  return p;
}

double aic(double log_likelihood, int k) { return 2.0 * k - 2.0 * log_likelihood; }

double aic(const ModelFit& fit) { return aic(fit.log_likelihood, fit.k); }

ModelFit fit_model(const SurvivalSample& sample, const FamilySpec& spec, const FitOptions& options) {
  const int k = spec.n_params();
  if (sample.n_events() == 0) throw AssessmentError("no events: fitting undefined");
  if (sample.size() < static_cast<std::size_t>(k) + 1) {
    throw AssessmentError(fmt::format("{} needs at least {} records, got {}", spec.label(), k + 1,
                                      sample.size()));
  }
  check_zero_events(sample, spec.family);

  const auto groups = group_times(sample);
  const auto objective = [&](std::span<const double> theta) {
    return -grouped_log_likelihood(spec, from_unconstrained(spec, theta), groups);
  };

  NelderMeadOptions nm;
  nm.ftol = options.objective_tolerance;
  nm.xtol = options.parameter_tolerance;
  nm.max_iterations = options.max_iterations;
  nm.max_restarts = options.max_restarts;
  nm.lower = lower_bounds(spec);
  nm.upper = upper_bounds(spec);
  const auto opt = nelder_mead(objective, to_unconstrained(spec, initial_params(sample, spec)), nm);

  ModelFit fit;
  fit.spec = spec;
  fit.unconstrained = opt.x;
  fit.params = from_unconstrained(spec, opt.x);
  fit.log_likelihood = -opt.value;
  fit.k = k;
  fit.aic = aic(fit.log_likelihood, k);
  fit.n = sample.size();
  fit.n_events = sample.n_events();
  fit.converged = opt.converged && std::isfinite(fit.log_likelihood);
  fit.iterations = opt.iterations;
  if (!fit.converged) fit.diagnostic = "optimizer did not meet tolerance";

  if (options.standard_errors && std::isfinite(fit.log_likelihood)) {
    // Central-difference Hessian of the log-likelihood on the fitting scale.
    const double h = options.hessian_step;
    const auto n = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd hess(n, n);
    std::vector<double> x = opt.x;
    const auto ll = [&](const std::vector<double>& at) { return -objective(at); };
    const double f0 = fit.log_likelihood;
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = opt.x[i] + h;
      const double fp = ll(x);
      x[i] = opt.x[i] - h;
      const double fm = ll(x);
      x[i] = opt.x[i];
      hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
      for (Eigen::Index j = 0; j < i; ++j) {
        x[i] = opt.x[i] + h;
        x[j] = opt.x[j] + h;
        const double fpp = ll(x);
        x[j] = opt.x[j] - h;
        const double fpm = ll(x);
        x[i] = opt.x[i] - h;
        const double fmm = ll(x);
        x[j] = opt.x[j] + h;
        const double fmp = ll(x);
        x[i] = opt.x[i];
        x[j] = opt.x[j];
        hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
    }
    const Eigen::MatrixXd info = -hess;
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (!info.allFinite() || llt.info() != Eigen::Success) {
      fit.diagnostic = "Hessian is not negative definite at the optimum; standard errors unavailable";
    } else {
      const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
      std::vector<double> se(static_cast<std::size_t>(k));
      for (Eigen::Index i = 0; i < n; ++i) se[static_cast<std::size_t>(i)] = std::sqrt(cov(i, i));
      fit.standard_errors = std::move(se);
    }
  }
  return fit;
}

std::optional<std::vector<WaldInterval>> wald_intervals(const ModelFit& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must be in (0, 1)");
  if (!fit.standard_errors) return std::nullopt;

  const double z = special::normal_quantile(0.5 + 0.5 * level);
  const auto names = parameter_names(fit.spec);
  const auto values = parameter_values(fit.spec, fit.params);
  std::vector<WaldInterval> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    WaldInterval w;
    w.name = names[i];
    w.estimate = values[i];
    w.se = (*fit.standard_errors)[i];
    w.estimate_unconstrained = fit.unconstrained[i];
    w.lower_unconstrained = w.estimate_unconstrained - z * w.se;
    w.upper_unconstrained = w.estimate_unconstrained + z * w.se;

    const bool is_cure = fit.spec.cure && i == 0;
    const bool identity = fit.spec.family == Family::lognormal && i == (fit.spec.cure ? 1u : 0u);
    const auto back = [&](double v) {
      if (is_cure) return inv_logit(v);
      if (identity) return v;
      return std::exp(v);
    };
    w.lower = back(w.lower_unconstrained);
    w.upper = back(w.upper_unconstrained);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace curecheck
