#pragma once

#include <cstddef>
#include <vector>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// W divided by the sum of its entries. Throws std::invalid_argument for
/// negative, non-finite or all-zero input.
[[nodiscard]] Matrix normalize_matrix(const Matrix& W);

/// Frobenius distance between the normalized matrices.
[[nodiscard]] double frobenius_error(const Matrix& estimate, const Matrix& truth);

/// Hellinger distance between the normalized matrices treated as
/// distributions; lies in [0, 1].
[[nodiscard]] double hellinger_distance(const Matrix& estimate, const Matrix& truth);

/// Same measures on the matrices as given (no normalization). The Hellinger
/// variant expects both inputs to already sum to one.
[[nodiscard]] double frobenius_error_raw(const Matrix& a, const Matrix& b);
[[nodiscard]] double hellinger_distance_raw(const Matrix& p, const Matrix& q);

/// ||estimate - truth||_2 / ||truth||_2.
[[nodiscard]] double relative_error(const Vector& estimate, const Vector& truth);

struct Edge {
  std::size_t receiver = 0;
  std::size_t source = 0;
  double weight = 0.0;
};

/// Entries strictly above tau, sorted by descending weight (ties by
/// receiver, then source).
[[nodiscard]] std::vector<Edge> edge_threshold(const Matrix& W, double tau = 0.15,
                                               bool self_loops = true);

/// Summary of how well an estimate separates the nonzero pattern of a
/// reference matrix from its zero entries.
struct PatternSeparation {
  double min_on = 0.0;
  double max_off = 0.0;
  double mean_on = 0.0;
  double mean_off = 0.0;

  /// min_on > max_off.
  [[nodiscard]] bool separated() const { return min_on > max_off; }
  [[nodiscard]] double mean_ratio() const { return mean_on / mean_off; }
};

/// Splits `estimate` by the support of `pattern`. Both classes must be
/// non-empty.
[[nodiscard]] PatternSeparation pattern_separation(const Matrix& estimate, const Matrix& pattern);

struct EvalReport {
  double frobenius = 0.0;
  double hellinger = 0.0;
  double relative_error = 0.0;
  std::vector<Edge> edges;
};

/// Matrix errors of alpha after normalization, the relative error of the
/// stacked (mu, alpha) vector and the thresholded edges of the estimate.
[[nodiscard]] EvalReport evaluate(const HawkesParams& estimate, const HawkesParams& truth,
                                  double tau = 0.15);

}  // namespace hawkesnet
