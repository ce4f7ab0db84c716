#include "hawkesnet/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hawkesnet {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> CountSeries::segments() const {
  std::vector<std::size_t> starts = segment_starts;
  starts.push_back(0);
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t K = steps();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::size_t begin = starts[s];
    if (begin >= K) break;
    const std::size_t end = s + 1 < starts.size() ? std::min(starts[s + 1], K) : K;
    out.emplace_back(begin, end);
  }
  return out;
}

std::vector<char> CountSeries::segment_start_mask() const {
  std::vector<char> mask(steps(), 0);
  for (auto [begin, end] : segments()) mask[begin] = 1;
  return mask;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> CountSeries::totals() const {
  return counts.colwise().sum().transpose();
}

Vector CountSeries::mean_counts() const {
  Vector out = counts.cast<double>().colwise().sum().transpose();
  if (steps() > 0) out /= static_cast<double>(steps());
  return out;
}

void CountSeries::validate() const {
  if (counts.rows() < 1) throw std::invalid_argument("count series needs at least one bin");
  if (counts.cols() < 1) throw std::invalid_argument("count series needs at least one node");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("bin width dt must be positive and finite");
  }
  if (!node_ids.empty() && node_ids.size() != nodes()) {
    throw std::invalid_argument("node_ids has " + std::to_string(node_ids.size()) +
                                " labels for " + std::to_string(nodes()) + " columns");
  }
  for (Eigen::Index k = 0; k < counts.rows(); ++k) {
    for (Eigen::Index i = 0; i < counts.cols(); ++i) {
      if (counts(k, i) < 0) {
        std::ostringstream msg;
        msg << "negative count " << counts(k, i) << " at bin " << k << ", node " << i;
        throw std::invalid_argument(msg.str());
      }
    }
  }
  for (std::size_t s : segment_starts) {
    if (s >= steps() && !(s == 0)) {
      throw std::invalid_argument("segment start " + std::to_string(s) + " beyond series length");
    }
  }
}

CountSeries CountSeries::head(std::size_t k) const {
  CountSeries out;
  k = std::min(k, steps());
  out.counts = counts.topRows(idx(k));
  out.dt = dt;
  out.node_ids = node_ids;
  out.segment_starts.clear();
  for (std::size_t s : segment_starts) {
    if (s < k) out.segment_starts.push_back(s);
  }
  if (out.segment_starts.empty()) out.segment_starts.push_back(0);
  return out;
}

CountSeries CountSeries::from_counts(CountMatrix counts, double dt) {
  CountSeries out;
  out.counts = std::move(counts);
  out.dt = dt;
  out.node_ids.reserve(out.nodes());
  for (std::size_t i = 0; i < out.nodes(); ++i) out.node_ids.push_back("n" + std::to_string(i));
  return out;
}

DecaySpec DecaySpec::scalar(double gamma, std::size_t m) {
  DecaySpec out;
  out.kind_ = DecayKind::scalar;
  out.pair_ = Matrix::Constant(idx(m), idx(m), gamma);
  return out;
}

DecaySpec DecaySpec::per_node(const Vector& gamma) {
  DecaySpec out;
  out.kind_ = DecayKind::per_node;
  out.pair_ = gamma.replicate(1, gamma.size());
  return out;
}

DecaySpec DecaySpec::per_pair(const Matrix& gamma) {
  if (gamma.rows() != gamma.cols()) throw std::invalid_argument("per-pair decay must be square");
  DecaySpec out;
  out.kind_ = DecayKind::per_pair;
  out.pair_ = gamma;
  return out;
}

double DecaySpec::receiver(std::size_t i) const { return pair_.row(idx(i)).maxCoeff(); }

bool DecaySpec::row_uniform(std::size_t i) const {
  const auto row = pair_.row(idx(i));
  return (row.array() == row(0)).all();
}

DecaySpec DecaySpec::permuted(const std::vector<std::size_t>& perm) const {
  DecaySpec out = *this;
  const std::size_t m = perm.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) out.pair_(idx(a), idx(b)) = pair_(idx(perm[a]), idx(perm[b]));
  }
  return out;
}

void HawkesParams::validate_finite() const {
  const auto m = mu.size();
  if (m < 1) throw std::invalid_argument("params need at least one node");
  if (alpha.rows() != m || alpha.cols() != m) {
    throw std::invalid_argument("alpha must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (gamma.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("decay specification does not match node count");
  }
  if (!mu.allFinite()) throw std::invalid_argument("mu has non-finite entries");
  if (!alpha.allFinite()) throw std::invalid_argument("alpha has non-finite entries");
  if (!gamma.pairs().allFinite()) throw std::invalid_argument("gamma has non-finite entries");
}

void HawkesParams::validate() const {
  validate_finite();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!(mu(i) > 0.0)) {
      throw std::invalid_argument("mu[" + std::to_string(i) + "] must be positive");
    }
  }
  for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
    for (Eigen::Index j = 0; j < alpha.cols(); ++j) {
      if (alpha(i, j) < 0.0) {
        throw std::invalid_argument("alpha[" + std::to_string(i) + "][" + std::to_string(j) +
                                    "] must be non-negative");
      }
      const double g = gamma.pairs()(i, j);
      if (!(g > 0.0 && g < 1.0)) {
        throw std::invalid_argument("gamma[" + std::to_string(i) + "][" + std::to_string(j) +
                                    "] must lie in (0, 1)");
      }
    }
  }
}

HawkesParams HawkesParams::permuted(const std::vector<std::size_t>& perm) const {
  HawkesParams out;
  const std::size_t m = perm.size();
  out.mu.resize(idx(m));
  out.alpha.resize(idx(m), idx(m));
  for (std::size_t a = 0; a < m; ++a) {
    out.mu(idx(a)) = mu(idx(perm[a]));
    for (std::size_t b = 0; b < m; ++b) out.alpha(idx(a), idx(b)) = alpha(idx(perm[a]), idx(perm[b]));
  }
  out.gamma = gamma.permuted(perm);
  return out;
}

CountSeries permute_nodes(const CountSeries& series, const std::vector<std::size_t>& perm) {
  CountSeries out = series;
  for (std::size_t c = 0; c < perm.size(); ++c) {
    out.counts.col(idx(c)) = series.counts.col(idx(perm[c]));
    if (!series.node_ids.empty()) out.node_ids[c] = series.node_ids[perm[c]];
  }
  return out;
}

}  // namespace hawkesnet
