#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hawkesnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when inputs are well-formed but violate a mathematical
/// precondition (non-positive intensity at an observed event, singular
/// systems, ...). The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K x m grid of event counts on uniform bins of width dt.
///
/// Row r holds the counts of bin r. The intensity of bin r depends only on
/// bins strictly before r inside the same segment; the count preceding the
/// first bin of a segment is taken as zero.
struct CountSeries {
  CountMatrix counts;
  double dt = 1.0;
  std::vector<std::string> node_ids;
  /// Row indices where decayed history restarts (always contains 0).
  std::vector<std::size_t> segment_starts{0};

  [[nodiscard]] std::size_t steps() const { return static_cast<std::size_t>(counts.rows()); }
  [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(counts.cols()); }
  [[nodiscard]] std::int64_t at(std::size_t k, std::size_t i) const {
    return counts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
  }

  /// Half-open [begin, end) row ranges of each segment.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> segments() const;

  /// Marks rows that start a segment (size K).
  [[nodiscard]] std::vector<char> segment_start_mask() const;

  /// Per-node totals.
  [[nodiscard]] Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> totals() const;

  /// Mean count per bin for each node.
  [[nodiscard]] Vector mean_counts() const;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  /// Leading `k` rows, keeping segment starts that fall inside.
  [[nodiscard]] CountSeries head(std::size_t k) const;

  [[nodiscard]] static CountSeries from_counts(CountMatrix counts, double dt = 1.0);
};

enum class DecayKind { scalar, per_node, per_pair };

/// Decay rates gamma in (0, 1). Stored as an m x m matrix whose (i, j)
/// entry is the rate applied to the excitation of receiver i by source j.
class DecaySpec {
 public:
  DecaySpec() = default;

  [[nodiscard]] static DecaySpec scalar(double gamma, std::size_t m);
  [[nodiscard]] static DecaySpec per_node(const Vector& gamma);
  [[nodiscard]] static DecaySpec per_pair(const Matrix& gamma);

  [[nodiscard]] DecayKind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(pair_.rows()); }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
    return pair_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  [[nodiscard]] const Matrix& pairs() const { return pair_; }
  /// Per-receiver value; for per-pair decay, the row maximum.
  [[nodiscard]] double receiver(std::size_t i) const;
  [[nodiscard]] double max() const { return pair_.maxCoeff(); }
  /// True when every entry of row i is equal (receiver-level decay).
  [[nodiscard]] bool row_uniform(std::size_t i) const;

  void set(std::size_t i, std::size_t j, double value) {
    pair_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
  }

  [[nodiscard]] DecaySpec permuted(const std::vector<std::size_t>& perm) const;

 private:
  DecayKind kind_ = DecayKind::scalar;
  Matrix pair_;
};

/// Discrete-time multivariate Hawkes parameters. alpha(i, j) is the
/// excitation of receiver i by an event at source j.
struct HawkesParams {
  Vector mu;
  Matrix alpha;
  DecaySpec gamma;

  [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(mu.size()); }

  /// Strict model invariants: mu > 0, alpha >= 0, 0 < gamma < 1.
  void validate() const;
  /// Shapes agree and every entry is finite (estimator iterates may sit on
  /// the boundary mu = 0 or gamma = 0).
  void validate_finite() const;

  /// Applies the node relabelling new_i = perm[i] -> old index.
  [[nodiscard]] HawkesParams permuted(const std::vector<std::size_t>& perm) const;
};

/// Relabels the columns of a count series: new column c is old column perm[c].
[[nodiscard]] CountSeries permute_nodes(const CountSeries& series,
                                        const std::vector<std::size_t>& perm);

}  // namespace hawkesnet
