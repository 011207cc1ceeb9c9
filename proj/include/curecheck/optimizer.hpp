#pragma once

#include <functional>
#include <span>
#include <vector>

namespace curecheck {

struct NelderMeadOptions {
  double ftol = 1e-9;  // absolute spread of objective values across the simplex
  double xtol = 1e-7;  // max coordinate distance of any vertex from the best one
  int max_iterations = 5000;
  int max_restarts = 3;
  double initial_step = 0.5;  // halved on each restart
  // Optional box; vertices are projected onto it before evaluation.
  std::vector<double> lower;
  std::vector<double> upper;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free minimization. Non-finite objective values are treated as
// +inf. After the first run the simplex is rebuilt around the incumbent and
// re-run until a restart fails to improve by more than ftol.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace curecheck
