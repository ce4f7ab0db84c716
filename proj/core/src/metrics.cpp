#include "hawkesnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

namespace hawkesnet {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrices differ in shape: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

Vector stacked(const HawkesParams& p) {
  Vector v(p.mu.size() + p.alpha.size());
  v.head(p.mu.size()) = p.mu;
  Eigen::Index k = p.mu.size();
  for (Eigen::Index i = 0; i < p.alpha.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.alpha.cols(); ++j) v(k++) = p.alpha(i, j);
  }
  return v;
}

}  // namespace

Matrix normalize_matrix(const Matrix& W) {
  if (W.size() == 0) throw std::invalid_argument("cannot normalize an empty matrix");
  if (!W.allFinite() || (W.array() < 0.0).any()) {
    throw std::invalid_argument("normalization needs finite non-negative entries");
  }
  const double total = W.sum();
  if (!(total > 0.0)) throw std::invalid_argument("cannot normalize an all-zero matrix");
  return W / total;
}

double frobenius_error_raw(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  return (a - b).norm();
}

double hellinger_distance_raw(const Matrix& p, const Matrix& q) {
  require_same_shape(p, q);
  if ((p.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw std::invalid_argument("Hellinger distance needs non-negative entries");
  }
  const double d = (p.array().sqrt() - q.array().sqrt()).matrix().norm() / std::sqrt(2.0);
  return std::min(d, 1.0);
}

double frobenius_error(const Matrix& estimate, const Matrix& truth) {
  require_same_shape(estimate, truth);
  return frobenius_error_raw(normalize_matrix(estimate), normalize_matrix(truth));
}

double hellinger_distance(const Matrix& estimate, const Matrix& truth) {
  require_same_shape(estimate, truth);
  return hellinger_distance_raw(normalize_matrix(estimate), normalize_matrix(truth));
}

double relative_error(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("parameter vectors differ in size");
  const double scale = truth.norm();
  if (!(scale > 0.0)) throw std::invalid_argument("relative error needs a nonzero reference");
  return (estimate - truth).norm() / scale;
}

std::vector<Edge> edge_threshold(const Matrix& W, double tau, bool self_loops) {
  if (!(tau >= 0.0)) throw std::invalid_argument("edge threshold must be non-negative");
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      if (!self_loops && i == j) continue;
      if (W(i, j) > tau) edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), W(i, j)});
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
  return edges;
}

PatternSeparation pattern_separation(const Matrix& estimate, const Matrix& pattern) {
  require_same_shape(estimate, pattern);
  PatternSeparation s;
  s.min_on = std::numeric_limits<double>::infinity();
  s.max_off = -std::numeric_limits<double>::infinity();
  std::size_t on = 0;
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < estimate.rows(); ++i) {
    for (Eigen::Index j = 0; j < estimate.cols(); ++j) {
      const double v = estimate(i, j);
      if (pattern(i, j) != 0.0) {
        s.min_on = std::min(s.min_on, v);
        s.mean_on += v;
        ++on;
      } else {
        s.max_off = std::max(s.max_off, v);
        s.mean_off += v;
        ++off;
      }
    }
  }
  if (on == 0 || off == 0) throw std::invalid_argument("pattern needs both zero and nonzero entries");
  s.mean_on /= static_cast<double>(on);
  s.mean_off /= static_cast<double>(off);
  return s;
}

EvalReport evaluate(const HawkesParams& estimate, const HawkesParams& truth, double tau) {
  EvalReport r;
  r.frobenius = frobenius_error(estimate.alpha, truth.alpha);
  r.hellinger = hellinger_distance(estimate.alpha, truth.alpha);
  r.relative_error = relative_error(stacked(estimate), stacked(truth));
  r.edges = edge_threshold(estimate.alpha, tau);
  return r;
}

}  // namespace hawkesnet
