#include "hawkesnet/model.hpp"

#include <cmath>
#include <sstream>

#include "hawkesnet/log.hpp"
#include "hawkesnet/parallel.hpp"
#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

void check_dims(const HawkesParams& params, const CountSeries& counts) {
  params.validate_finite();
  if (params.nodes() != counts.nodes()) {
    std::ostringstream msg;
    msg << "parameters describe " << params.nodes() << " nodes but counts have " << counts.nodes();
    throw std::invalid_argument(msg.str());
  }
}

// Fills column i of lam for one segment [begin, end).
void node_segment(const HawkesParams& p, const CountSeries& c, std::size_t i, std::size_t begin,
                  std::size_t end, IntensityPath& lam) {
  const Index ii = static_cast<Index>(i);
  const Index m = static_cast<Index>(p.nodes());
  const double mu = p.mu(ii);
  if (p.gamma.row_uniform(i)) {
    const double g = p.gamma(i, 0);
    double current = mu;
    for (std::size_t k = begin; k < end; ++k) {
      const Index kk = static_cast<Index>(k);
      lam(kk, ii) = current;
      double drive = 0.0;
      for (Index j = 0; j < m; ++j) drive += p.alpha(ii, j) * static_cast<double>(c.counts(kk, j));
      current = mu + (current - mu) * g + drive;
    }
    return;
  }
  Vector acc = Vector::Zero(m);
  for (std::size_t k = begin; k < end; ++k) {
    const Index kk = static_cast<Index>(k);
    lam(kk, ii) = mu + p.alpha.row(ii).dot(acc);
    for (Index j = 0; j < m; ++j) {
      acc(j) = p.gamma.pairs()(ii, j) * acc(j) + static_cast<double>(c.counts(kk, j));
    }
  }
}

double poisson_term(double lam, std::int64_t n, double dt, std::size_t k, std::size_t i) {
  const double rate = lam * dt;
  if (n == 0) return rate;
  if (!(rate > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive intensity " << lam << " at bin " << k << ", node " << i
        << " with count " << n;
    throw DomainError(msg.str());
  }
  return rate - static_cast<double>(n) * std::log(rate);
}

}  // namespace

IntensityPath intensity_path(const HawkesParams& params, const CountSeries& counts) {
  check_dims(params, counts);
  const std::size_t m = params.nodes();
  IntensityPath lam(counts.counts.rows(), counts.counts.cols());
  const auto segments = counts.segments();
  auto fill = [&](std::size_t i) {
    for (auto [begin, end] : segments) node_segment(params, counts, i, begin, end, lam);
  };
  if (counts.steps() * m * m < 200000) {
    for (std::size_t i = 0; i < m; ++i) fill(i);
  } else {
    parallel_for(m, fill);
  }
  return lam;
}

Vector closed_form_intensity(const HawkesParams& params, const CountSeries& counts, std::size_t k) {
  check_dims(params, counts);
  if (k > counts.steps()) throw std::invalid_argument("step index beyond series length");
  std::size_t begin = 0;
  for (auto [b, e] : counts.segments()) {
    if (b <= k) begin = b;
  }
  const Index m = static_cast<Index>(params.nodes());
  Vector lam = params.mu;
  for (Index i = 0; i < m; ++i) {
    for (std::size_t l = begin; l < k; ++l) {
      const auto power = static_cast<double>(k - 1 - l);
      for (Index j = 0; j < m; ++j) {
        const auto n = counts.counts(static_cast<Index>(l), j);
        if (n == 0) continue;
        lam(i) += params.alpha(i, j) * std::pow(params.gamma.pairs()(i, j), power) *
                  static_cast<double>(n);
      }
    }
  }
  return lam;
}

Vector nll_per_node(const IntensityPath& lam, const CountSeries& counts) {
  const Index K = counts.counts.rows();
  const Index m = counts.counts.cols();
  if (lam.rows() != K || lam.cols() != m) throw std::invalid_argument("intensity shape mismatch");
  Vector out = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    double total = 0.0;
    for (Index k = 0; k < K; ++k) {
      total += poisson_term(lam(k, i), counts.counts(k, i), counts.dt, static_cast<std::size_t>(k),
                            static_cast<std::size_t>(i));
    }
    out(i) = total;
  }
  return out;
}

Vector nll_per_node(const HawkesParams& params, const CountSeries& counts) {
  return nll_per_node(intensity_path(params, counts), counts);
}

double nll(const HawkesParams& params, const CountSeries& counts) {
  return nll_per_node(params, counts).sum();
}

double full_nll(const HawkesParams& params, const CountSeries& counts) {
  double constant = 0.0;
  for (Index k = 0; k < counts.counts.rows(); ++k) {
    for (Index i = 0; i < counts.counts.cols(); ++i) {
      constant += std::lgamma(static_cast<double>(counts.counts(k, i)) + 1.0);
    }
  }
  return nll(params, counts) + constant;
}

Simulation simulate_hawkes(const HawkesParams& params, std::size_t steps, std::uint64_t seed,
                           double dt) {
  params.validate();
  if (steps < 1) throw std::invalid_argument("simulation needs at least one step");
  if (!(dt > 0.0)) throw std::invalid_argument("bin width dt must be positive");
  if (const double margin = stability_margin(params, dt); margin >= 1.0) {
    log_warn("simulating an unstable parameter set (margin " + std::to_string(margin) + ")");
  }
  const Index m = static_cast<Index>(params.nodes());
  const Index K = static_cast<Index>(steps);
  Simulation out;
  out.counts = CountSeries::from_counts(CountMatrix::Zero(K, m), dt);
  out.intensity.resize(K, m);

  std::vector<CounterRng> rngs;
  rngs.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) rngs.emplace_back(seed, std::initializer_list<std::uint64_t>{0x4841ULL, static_cast<std::uint64_t>(i)});

  const Matrix& gamma = params.gamma.pairs();
  Matrix acc = Matrix::Zero(m, m);
  for (Index k = 0; k < K; ++k) {
    for (Index i = 0; i < m; ++i) {
      const double lam = params.mu(i) + params.alpha.row(i).dot(acc.row(i));
      out.intensity(k, i) = lam;
      out.counts.counts(k, i) = rngs[static_cast<std::size_t>(i)].poisson(lam * dt);
    }
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        acc(i, j) = gamma(i, j) * acc(i, j) + static_cast<double>(out.counts.counts(k, j));
      }
    }
  }
  return out;
}

double stability_margin(const HawkesParams& params, double dt, const PowerIterationOptions& options) {
  params.validate_finite();
  const Index m = static_cast<Index>(params.nodes());
  Matrix shifted(m, m);
  for (Index i = 0; i < m; ++i) {
    const double g = params.gamma.receiver(static_cast<std::size_t>(i));
    shifted.row(i) = params.alpha.row(i) * (dt / (1.0 - g));
  }
  if (shifted.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  shifted.diagonal().array() += 1.0;

  Vector v = Vector::Ones(m) / std::sqrt(static_cast<double>(m));
  double estimate = 0.0;
  double residual = 0.0;
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    Vector w = shifted * v;
    const double norm = w.norm();
    if (!(norm > 0.0)) throw DomainError("power iteration collapsed to the zero vector");
    w /= norm;
    residual = (shifted * w - norm * w).norm();
    const bool settled = std::abs(norm - estimate) <= options.tol * norm;
    estimate = norm;
    v = std::move(w);
    if (settled && residual <= 1e3 * options.tol * norm) return estimate - 1.0;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge after " << options.max_iters
      << " iterations (residual " << residual << ")";
  throw DomainError(msg.str());
}

Vector stationary_mean(const HawkesParams& params, double dt) {
  params.validate_finite();
  const Index m = static_cast<Index>(params.nodes());
  Vector keep(m);
  for (Index i = 0; i < m; ++i) keep(i) = 1.0 - params.gamma.receiver(static_cast<std::size_t>(i));
  Matrix system = Matrix(keep.asDiagonal()) - params.alpha * dt;
  return system.partialPivLu().solve(keep.cwiseProduct(params.mu));
}

}  // namespace hawkesnet
