#include "hawkesnet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hawkesnet {

namespace {

using Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Penalized {
  const std::function<double(const Vector&)>& f;
  const Vector& lower;
  const Vector& upper;
  double barrier;
  std::size_t evaluations = 0;

  double operator()(const Vector& x) {
    double penalty = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      if (!(x(i) > lower(i) && x(i) < upper(i))) return kInf;
      if (std::isfinite(lower(i))) penalty -= std::log(x(i) - lower(i));
      if (std::isfinite(upper(i))) penalty -= std::log(upper(i) - x(i));
    }
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v + barrier * penalty : kInf;
  }
};

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                           const Vector& lower, const Vector& upper, const NelderMeadOptions& options) {
  const Index n = x0.size();
  if (n < 1) throw std::invalid_argument("nothing to optimize");
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bounds do not match x0");
  if (!((x0.array() > lower.array()).all() && (x0.array() < upper.array()).all())) {
    throw std::invalid_argument("starting point must lie strictly inside the bounds");
  }
  Penalized g{f, lower, upper, options.barrier};

  Vector best = x0;
  double best_value = g(best);
  if (!std::isfinite(best_value)) throw DomainError("objective is not finite at the starting point");

  for (std::size_t start = 0; start <= options.restarts; ++start) {
    std::vector<Vector> simplex(static_cast<std::size_t>(n) + 1, best);
    std::vector<double> values(simplex.size(), best_value);
    for (Index i = 0; i < n; ++i) {
      Vector& v = simplex[static_cast<std::size_t>(i) + 1];
      const double h = options.initial_step * std::max(std::abs(best(i)), 1e-3);
      v(i) += h;
      values[static_cast<std::size_t>(i) + 1] = g(v);
      if (!std::isfinite(values[static_cast<std::size_t>(i) + 1])) {
        v(i) = best(i) - h;
        values[static_cast<std::size_t>(i) + 1] = g(v);
      }
      if (!std::isfinite(values[static_cast<std::size_t>(i) + 1])) {
        v(i) = best(i) + 0.5 * (std::min(upper(i), best(i) + h) - best(i));
        values[static_cast<std::size_t>(i) + 1] = g(v);
      }
    }
    const std::size_t budget = g.evaluations + options.max_evals;
    std::vector<std::size_t> order(simplex.size());
    while (g.evaluations < budget) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[order.size() - 2];
      if (std::abs(values[hi] - values[lo]) <= options.ftol * (1.0 + std::abs(values[lo])) &&
          std::isfinite(values[hi])) {
        break;
      }
      Vector centroid = Vector::Zero(n);
      for (std::size_t k = 0; k < simplex.size(); ++k) {
        if (k != hi) centroid += simplex[k];
      }
      centroid /= static_cast<double>(n);
      const Vector reflected = centroid + (centroid - simplex[hi]);
      const double fr = g(reflected);
      if (fr < values[lo]) {
        const Vector expanded = centroid + 2.0 * (centroid - simplex[hi]);
        const double fe = g(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          values[hi] = fe;
        } else {
          simplex[hi] = reflected;
          values[hi] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[hi] = reflected;
        values[hi] = fr;
        continue;
      }
      const bool outside = fr < values[hi];
      const Vector contracted =
          outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[hi] - centroid));
      const double fc = g(contracted);
      if (fc < std::min(fr, values[hi])) {
        simplex[hi] = contracted;
        values[hi] = fc;
        continue;
      }
      for (std::size_t k = 0; k < simplex.size(); ++k) {
        if (k == lo) continue;
        simplex[k] = simplex[lo] + 0.5 * (simplex[k] - simplex[lo]);
        values[k] = g(simplex[k]);
      }
    }
    const auto it = std::min_element(values.begin(), values.end());
    if (*it < best_value) {
      best_value = *it;
      best = simplex[static_cast<std::size_t>(it - values.begin())];
    }
  }
  MinimizeResult out;
  out.x = best;
  out.value = f(best);
  out.evaluations = g.evaluations + 1;
  return out;
}

}  // namespace hawkesnet
