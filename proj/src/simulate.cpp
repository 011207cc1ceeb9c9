#include "curecheck/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "curecheck/errors.hpp"

namespace curecheck {

namespace {

// Top 53 bits of a 64-bit draw, centred so the result is never 0 or 1.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_censoring(const Censoring& c, double u) {
  switch (c.kind) {
    case Censoring::Kind::administrative:
      return c.time;
    case Censoring::Kind::uniform:
      return u * c.max;
    case Censoring::Kind::exponential:
      return -std::log(u) / c.rate;
    case Censoring::Kind::composite:
      return std::min(c.time, u * c.max);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Censoring Censoring::administrative(double end_of_study) {
  Censoring c;
  c.kind = Kind::administrative;
  c.time = end_of_study;
  return c;
}

Censoring Censoring::uniform(double upper) {
  Censoring c;
  c.kind = Kind::uniform;
  c.max = upper;
  return c;
}

Censoring Censoring::exponential(double dropout_rate) {
  Censoring c;
  c.kind = Kind::exponential;
  c.rate = dropout_rate;
  return c;
}

Censoring Censoring::composite(double end_of_study, double dropout_upper) {
  Censoring c;
  c.kind = Kind::composite;
  c.time = end_of_study;
  c.max = dropout_upper;
  return c;
}

double Censoring::survival(double t) const {
  if (t < 0.0) return 1.0;
  switch (kind) {
    case Kind::administrative:
      return t < time ? 1.0 : 0.0;
    case Kind::uniform:
      return std::max(0.0, 1.0 - t / max);
    case Kind::exponential:
      return std::exp(-rate * t);
    case Kind::composite:
      return t < time ? std::max(0.0, 1.0 - t / max) : 0.0;
  }
  return 0.0;
}

std::string Censoring::describe() const {
  switch (kind) {
    case Kind::administrative:
      return fmt::format("administrative({})", time);
    case Kind::uniform:
      return fmt::format("uniform(0, {})", max);
    case Kind::exponential:
      return fmt::format("exponential({})", rate);
    case Kind::composite:
      return fmt::format("composite(administrative {}, uniform dropout 0..{})", time, max);
  }
  return "unknown";
}

void validate_config(const SimulationConfig& config) {
  if (config.n == 0) throw ValidationError("simulation needs n >= 1");
  if (!(config.cure_fraction >= 0.0 && config.cure_fraction <= 1.0)) {
    throw ValidationError("cure fraction must be in [0, 1]");
  }
  try {
    check_params({config.family, false}, Params{std::nullopt, config.latency});
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }

  const auto& c = config.censoring;
  switch (c.kind) {
    case Censoring::Kind::administrative:
      if (!(c.time > 0.0)) throw ValidationError("administrative censoring time must be positive");
      if (std::isinf(c.time) && config.cure_fraction > 0.0) {
        throw ValidationError("cured subjects need a finite censoring time");
      }
      break;
    case Censoring::Kind::uniform:
      if (!(c.max > 0.0 && std::isfinite(c.max))) throw ValidationError("uniform censoring bound must be positive");
      break;
    case Censoring::Kind::exponential:
      if (!(c.rate > 0.0 && std::isfinite(c.rate))) throw ValidationError("censoring rate must be positive");
      break;
    case Censoring::Kind::composite:
      if (!(c.time > 0.0) || !(c.max > 0.0 && std::isfinite(c.max))) {
        throw ValidationError("composite censoring needs a positive study end and dropout bound");
      }
      break;
  }
}

SimulatedSample simulate_mixture(const SimulationConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);

  SimulationTruth truth;
  truth.config = config;
  std::vector<Observation> raw;
  raw.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    // Fixed number of draws per subject keeps the stream aligned.
    const double u_cure = open_unit(rng);
    const double u_event = open_unit(rng);
    const double u_censor = open_unit(rng);

    const double censor = draw_censoring(config.censoring, u_censor);
    const bool cured = u_cure < config.cure_fraction;
    if (cured) {
      ++truth.n_cured;
      raw.push_back({censor, false});
      continue;
    }
    const double t = latency_quantile(config.family, config.latency, u_event);
    if (t <= censor) {
      raw.push_back({t, true});
    } else {
      raw.push_back({censor, false});
    }
  }
  SimulatedSample out{SurvivalSample::validate(std::move(raw), config.time_unit), std::move(truth)};
  out.truth.n_events = out.sample.n_events();
  out.truth.n_censored = out.sample.n_censored();
  return out;
}

SurvivalSample restrict_followup(const SurvivalSample& sample, double cutoff) {
  if (!(cutoff > 0.0) || std::isnan(cutoff)) {
    throw ValidationError(fmt::format("cutoff must be positive (got {})", cutoff));
  }
  std::vector<Observation> raw(sample.records().begin(), sample.records().end());
  for (auto& r : raw) {
    if (r.time > cutoff) r = {cutoff, false};
  }
  return SurvivalSample::validate(std::move(raw), sample.time_unit());
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t index) {
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace curecheck
