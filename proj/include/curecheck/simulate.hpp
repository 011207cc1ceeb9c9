#pragma once

// Mixture cure data generation with known ground truth, artificial
// follow-up truncation, and the seeded replicate runner used by the
// validation studies.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed by
// the standard, mapped to (0, 1) by taking the top 53 bits. Every family is
// sampled by inverting its CDF, so a (config, seed) pair produces the same
// sample on every platform.

#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "curecheck/models.hpp"
#include "curecheck/parallel.hpp"
#include "curecheck/survival.hpp"

namespace curecheck {

struct Censoring {
  enum class Kind { administrative, uniform, exponential, composite };

  Kind kind = Kind::administrative;
  double time = 0.0;  // administrative end of study (administrative, composite)
  double max = 0.0;   // upper end of Uniform(0, max) dropout (uniform, composite)
  double rate = 0.0;  // exponential dropout rate

  static Censoring administrative(double end_of_study);
  static Censoring uniform(double upper);
  static Censoring exponential(double dropout_rate);
  static Censoring composite(double end_of_study, double dropout_upper);

  // P(U > t).
  double survival(double t) const;
  std::string describe() const;
};

struct SimulationConfig {
  std::size_t n = 100;
  double cure_fraction = 0.0;
  Family family = Family::weibull;
  std::vector<double> latency{1.0, 1.0};
  Censoring censoring = Censoring::administrative(1.0);
  std::uint64_t seed = 1;
  std::string time_unit = "years";
};

void validate_config(const SimulationConfig& config);

struct SimulationTruth {
  SimulationConfig config;
  std::size_t n_cured = 0;
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
};

struct SimulatedSample {
  SurvivalSample sample;
  SimulationTruth truth;
};

// Cured subjects keep no latent event time; they contribute (U, censored).
SimulatedSample simulate_mixture(const SimulationConfig& config);

// Records observed past `cutoff` become censored at `cutoff`.
SurvivalSample restrict_followup(const SurvivalSample& sample, double cutoff);

// Deterministic per-replicate seed derived from a base seed (splitmix64).
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t index);

// Runs fn(seed, index) for every replicate and returns the results in index
// order. The parallel and serial paths give identical output as long as fn
// depends only on its arguments.
template <class Fn>
auto run_replicates(std::size_t count, std::uint64_t base_seed, Fn&& fn,
                    Execution execution = Execution::parallel) {
  using Result = decltype(fn(std::uint64_t{}, std::size_t{}));
  std::vector<Result> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto body = [&](std::size_t i) {
    try {
      out[i] = fn(replicate_seed(base_seed, i), i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto n = static_cast<long>(count);
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace curecheck
