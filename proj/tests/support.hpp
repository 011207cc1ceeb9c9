#pragma once

// Shared test helpers: hand-rolled random generators and oracles that do not
// go through the library's own numerics (Boost.Math stands in for the
// special functions, loops stand in for the grouped likelihood and KM).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/weibull.hpp>

#include "curecheck/models.hpp"
#include "curecheck/simulate.hpp"
#include "curecheck/survival.hpp"

namespace testkit {

using namespace curecheck;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  // Random sample with deliberate ties: times drawn from a small grid half
  // the time, continuous otherwise.
  std::vector<Observation> raw_sample(int n, double event_prob = 0.6, bool allow_zero = false) {
    std::vector<Observation> raw;
    const bool gridded = coin();
    for (int i = 0; i < n; ++i) {
      double t = gridded ? integer(allow_zero ? 0 : 1, 8) * 0.5 : uniform(0.01, 10.0);
      raw.push_back({t, coin(event_prob)});
    }
    return raw;
  }

  SurvivalSample sample(int n, double event_prob = 0.6) {
    auto raw = raw_sample(n, event_prob);
    raw[0].event = true;  // at least one event
    return SurvivalSample::validate(raw);
  }

  Family family() { return kAllFamilies[static_cast<std::size_t>(integer(0, 4))]; }

  Params params(const FamilySpec& spec) {
    Params p;
    if (spec.cure) p.cure_fraction = uniform(0.05, 0.9);
    switch (spec.family) {
      case Family::exponential:
        p.latency = {log_uniform(0.1, 5.0)};
        break;
      case Family::lognormal:
        p.latency = {uniform(-1.5, 1.5), log_uniform(0.3, 2.0)};
        break;
      default:
        p.latency = {log_uniform(0.4, 3.0), log_uniform(0.3, 4.0)};
    }
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Latency survival and density straight from Boost.Math (log-logistic from
// its textbook closed form, Boost has no such distribution).
inline double oracle_s0(Family f, const std::vector<double>& p, double t) {
  using namespace boost::math;
  switch (f) {
    case Family::exponential:
      return cdf(complement(exponential_distribution<>(p[0]), t));
    case Family::weibull:
      return cdf(complement(weibull_distribution<>(p[0], p[1]), t));
    case Family::gamma:
      return cdf(complement(gamma_distribution<>(p[0], 1.0 / p[1]), t));
    case Family::loglogistic:
      return 1.0 / (1.0 + std::pow(t / p[1], p[0]));
    case Family::lognormal:
      return t <= 0.0 ? 1.0 : cdf(complement(lognormal_distribution<>(p[0], p[1]), t));
  }
  return 0.0;
}

inline double oracle_f0(Family f, const std::vector<double>& p, double t) {
  using namespace boost::math;
  switch (f) {
    case Family::exponential:
      return pdf(exponential_distribution<>(p[0]), t);
    case Family::weibull:
      return pdf(weibull_distribution<>(p[0], p[1]), t);
    case Family::gamma:
      return pdf(gamma_distribution<>(p[0], 1.0 / p[1]), t);
    case Family::loglogistic: {
      const double z = std::pow(t / p[1], p[0]);
      return p[0] / t * z / ((1.0 + z) * (1.0 + z));
    }
    case Family::lognormal:
      return pdf(lognormal_distribution<>(p[0], p[1]), t);
  }
  return 0.0;
}

// One term per record, no grouping, no hoisting.
inline double naive_log_likelihood(const FamilySpec& spec, const Params& params, const SurvivalSample& sample) {
  const double c = params.cure_fraction.value_or(0.0);
  double ll = 0.0;
  for (const auto& r : sample.records()) {
    const double s0 = oracle_s0(spec.family, params.latency, r.time);
    if (r.event) {
      ll += std::log((1.0 - c) * oracle_f0(spec.family, params.latency, r.time));
    } else {
      ll += std::log(c + (1.0 - c) * s0);
    }
  }
  return ll;
}

// Product-limit estimate evaluated directly at t from its definition: for
// every distinct event time u <= t, multiply by 1 - d(u)/r(u).
inline double brute_km(const std::vector<Observation>& raw, double t) {
  std::vector<double> event_times;
  for (const auto& o : raw) {
    if (o.event && o.time <= t) event_times.push_back(o.time);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  double s = 1.0;
  for (double u : event_times) {
    double d = 0, r = 0;
    for (const auto& o : raw) {
      if (o.time >= u) ++r;
      if (o.time == u && o.event) ++d;
    }
    s *= 1.0 - d / r;
  }
  return s;
}

// The shared recovery setup: cure 0.4, Weibull(0.8, 0.8), administrative
// censoring at 7.3 with uniform dropout over (0, 30).
inline SimulationConfig recovery_config(std::uint64_t seed, std::size_t n = 1000) {
  SimulationConfig c;
  c.n = n;
  c.cure_fraction = 0.4;
  c.family = Family::weibull;
  c.latency = {0.8, 0.8};
  c.censoring = Censoring::composite(7.3, 30.0);
  c.seed = seed;
  return c;
}

}  // namespace testkit
