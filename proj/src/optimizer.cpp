#include "curecheck/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace curecheck {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

class Simplex {
 public:
  Simplex(const Objective& f, const NelderMeadOptions& opt) : f_(f), opt_(opt) {}

  void project(std::vector<double>& x) const {
    if (!opt_.lower.empty()) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i], opt_.lower[i]);
    }
    if (!opt_.upper.empty()) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(x[i], opt_.upper[i]);
    }
  }

  double eval(std::vector<double>& x) {
    project(x);
    ++evaluations;
    const double v = f_(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  // One simplex run from x0. Returns true when the tolerance was met.
  bool run(const std::vector<double>& x0, double step) {
    const std::size_t n = x0.size();
    pts_.assign(n + 1, x0);
    vals_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      pts_[i + 1][i] += step;
      project(pts_[i + 1]);
      // A vertex projected back onto x0 would make the simplex degenerate.
      if (pts_[i + 1][i] == x0[i]) pts_[i + 1][i] -= step;
    }
    for (std::size_t i = 0; i <= n; ++i) vals_[i] = eval(pts_[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    for (int iter = 0; iter < opt_.max_iterations; ++iter) {
      ++iterations;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return vals_[a] < vals_[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];

      if (converged(best, worst)) {
        record_best();
        return true;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts_[i][j];
      }
      for (auto& c : centroid) c /= static_cast<double>(n);

      for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + kReflect * (centroid[j] - pts_[worst][j]);
      const double fr = eval(xr);

      if (fr < vals_[best]) {
        for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + kExpand * (xr[j] - centroid[j]);
        const double fe = eval(xe);
        if (fe < fr) {
          replace(worst, xe, fe);
        } else {
          replace(worst, xr, fr);
        }
        continue;
      }
      if (fr < vals_[second]) {
        replace(worst, xr, fr);
        continue;
      }

      // Contraction: outside if the reflected point beats the worst vertex.
      const bool outside = fr < vals_[worst];
      const auto& anchor = outside ? xr : pts_[worst];
      for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + kContract * (anchor[j] - centroid[j]);
      const double fc = eval(xc);
      if (fc < std::min(fr, vals_[worst])) {
        replace(worst, xc, fc);
        continue;
      }

      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < n; ++j) {
          pts_[i][j] = pts_[best][j] + kShrink * (pts_[i][j] - pts_[best][j]);
        }
        vals_[i] = eval(pts_[i]);
      }
    }
    record_best();
    return false;
  }

  std::vector<double> best_x;
  double best_value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;

 private:
  bool converged(std::size_t best, std::size_t worst) const {
    if (!(vals_[worst] - vals_[best] <= opt_.ftol)) return false;
    for (const auto& p : pts_) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (std::abs(p[j] - pts_[best][j]) > opt_.xtol) return false;
      }
    }
    return true;
  }

  void replace(std::size_t i, const std::vector<double>& x, double v) {
    pts_[i] = x;
    vals_[i] = v;
  }

  void record_best() {
    const auto it = std::min_element(vals_.begin(), vals_.end());
    best_value = *it;
    best_x = pts_[static_cast<std::size_t>(it - vals_.begin())];
  }

  const Objective& f_;
  const NelderMeadOptions& opt_;
  std::vector<std::vector<double>> pts_;
  std::vector<double> vals_;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  Simplex simplex(f, options);
  simplex.project(x0);

  NelderMeadResult result;
  bool ok = simplex.run(x0, options.initial_step);
  result.x = simplex.best_x;
  result.value = simplex.best_value;
  result.converged = ok;

  double step = options.initial_step;
  for (int r = 0; r < options.max_restarts; ++r) {
    step *= 0.5;
    ++result.restarts;
    ok = simplex.run(result.x, step);
    const bool improved = simplex.best_value < result.value - options.ftol;
    if (simplex.best_value <= result.value) {
      result.x = simplex.best_x;
      result.value = simplex.best_value;
    }
    result.converged = ok;
    if (ok && !improved) break;
  }
  result.iterations = simplex.iterations;
  result.evaluations = simplex.evaluations;
  return result;
}

}  // namespace curecheck
