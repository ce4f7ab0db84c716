#include "hawkesnet/particle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hawkesnet/parallel.hpp"
#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

constexpr std::uint64_t kPriorStream = 0x50;
constexpr std::uint64_t kNoiseStream = 0x51;
constexpr std::uint64_t kResampleStream = 0x52;
constexpr std::uint64_t kBackwardStream = 0x53;
constexpr std::size_t kChunk = 512;

std::size_t draw_index(const Vector& weights, double u) {
  const double target = u * weights.sum();
  double cumulative = 0.0;
  const Index n = weights.size();
  for (Index i = 0; i < n; ++i) {
    cumulative += weights(i);
    if (target < cumulative) return static_cast<std::size_t>(i);
  }
  for (Index i = n - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(n - 1);
}

void validate_transition(const TransitionModel& transition) {
  if (transition.dim < 1) throw std::invalid_argument("state dimension must be positive");
  if (!transition.mean) throw std::invalid_argument("transition mean is not set");
  if (transition.noise_sd.size() != static_cast<Index>(transition.dim) ||
      !(transition.noise_sd.array() > 0.0).all()) {
    throw std::invalid_argument("transition noise must be positive with one entry per dimension");
  }
}

}  // namespace

double effective_sample_size(const Vector& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) return 0.0;
  return total * total / weights.squaredNorm();
}

std::vector<std::size_t> systematic_resample(const Vector& weights, double u) {
  const Index n = weights.size();
  if (n == 0) throw std::invalid_argument("cannot resample an empty cloud");
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("resampling offset must lie in [0, 1)");
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total) || (weights.array() < 0.0).any()) {
    throw std::invalid_argument("resampling weights must be non-negative with a positive finite sum");
  }
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  double cumulative = weights(0) / total;
  Index i = 0;
  for (Index k = 0; k < n; ++k) {
    const double point = (u + static_cast<double>(k)) / static_cast<double>(n);
    while (point >= cumulative && i < n - 1) cumulative += weights(++i) / total;
    out[static_cast<std::size_t>(k)] = static_cast<std::size_t>(i);
  }
  return out;
}

double normalize_log_weights(const Vector& log_weights, Vector& weights) {
  const double top = log_weights.maxCoeff();
  if (!std::isfinite(top)) throw DomainError("all particle weights vanished");
  weights = (log_weights.array() - top).exp().matrix();
  const double total = weights.sum();
  weights /= total;
  return top + std::log(total);
}

ParticleCloud particle_filter(const TransitionModel& transition, const GaussianPrior& prior,
                              const ObservationLogLik& observe, std::size_t steps,
                              const ParticleOptions& options) {
  validate_transition(transition);
  const Index d = static_cast<Index>(transition.dim);
  const Index n = static_cast<Index>(options.particles);
  if (n < 1) throw std::invalid_argument("particle count must be positive");
  if (!(options.resample_threshold >= 0.0 && options.resample_threshold <= 1.0)) {
    throw std::invalid_argument("resample threshold must lie in [0, 1]");
  }
  if (prior.mean.size() != d || prior.sd.size() != d || (prior.sd.array() < 0.0).any()) {
    throw std::invalid_argument("prior must have one non-negative sd per dimension");
  }
  ParticleCloud cloud;
  cloud.states.resize(steps + 1);
  cloud.weights.resize(static_cast<Index>(steps) + 1, n);
  cloud.ess.resize(static_cast<Index>(steps) + 1);

  Matrix& x0 = cloud.states[0];
  x0.resize(n, d);
  for (Index p = 0; p < n; ++p) {
    CounterRng rng(options.seed, {kPriorStream, static_cast<std::uint64_t>(p)});
    for (Index c = 0; c < d; ++c) x0(p, c) = prior.mean(c) + prior.sd(c) * rng.normal();
  }
  cloud.weights.row(0).setConstant(1.0 / static_cast<double>(n));
  cloud.ess(0) = static_cast<double>(n);

  Matrix previous(n, d);
  Vector weights(n);
  Vector loglik(n);
  Vector log_weights(n);
  for (std::size_t t = 1; t <= steps; ++t) {
    const Index ti = static_cast<Index>(t);
    weights = cloud.weights.row(ti - 1).transpose();
    if (cloud.ess(ti - 1) < options.resample_threshold * static_cast<double>(n)) {
      CounterRng rng(options.seed, {kResampleStream, static_cast<std::uint64_t>(t)});
      const std::vector<std::size_t> ancestors = systematic_resample(weights, rng.uniform());
      for (Index p = 0; p < n; ++p) {
        previous.row(p) = cloud.states[t - 1].row(static_cast<Index>(ancestors[static_cast<std::size_t>(p)]));
      }
      weights.setConstant(1.0 / static_cast<double>(n));
      cloud.resampled.push_back(t - 1);
    } else {
      previous = cloud.states[t - 1];
    }
    Matrix& current = cloud.states[t];
    current.resize(n, d);
    transition.mean(previous, current);
    const std::size_t chunks = (static_cast<std::size_t>(n) + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t chunk) {
      const Index end = std::min<Index>(n, static_cast<Index>((chunk + 1) * kChunk));
      for (Index p = static_cast<Index>(chunk * kChunk); p < end; ++p) {
        CounterRng rng(options.seed, {kNoiseStream, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(p)});
        for (Index c = 0; c < d; ++c) current(p, c) += transition.noise_sd(c) * rng.normal();
      }
    });
    loglik.setZero();
    observe(t, current, loglik);
    log_weights = weights.array().log().matrix() + loglik;
    Vector normalized;
    try {
      cloud.log_evidence += normalize_log_weights(log_weights, normalized);
    } catch (const DomainError&) {
      throw DomainError("particle weights vanished at step " + std::to_string(t));
    }
    cloud.weights.row(ti) = normalized.transpose();
    cloud.ess(ti) = effective_sample_size(normalized);
  }
  return cloud;
}

SmoothedPaths backward_simulate(const ParticleCloud& cloud, const TransitionModel& transition,
                                std::size_t paths, std::uint64_t seed) {
  validate_transition(transition);
  if (cloud.states.empty()) throw std::invalid_argument("empty particle cloud");
  if (paths < 1) throw std::invalid_argument("path count must be positive");
  const std::size_t K = cloud.steps();
  const Index n = static_cast<Index>(cloud.particles());
  const Index d = static_cast<Index>(transition.dim);

  std::vector<Matrix> means(K);
  for (std::size_t t = 0; t < K; ++t) {
    means[t].resize(n, d);
    transition.mean(cloud.states[t], means[t]);
  }
  const Matrix log_filter = cloud.weights.array().log().matrix();
  const Vector half_precision = (0.5 / transition.noise_sd.array().square()).matrix();

  SmoothedPaths out;
  out.paths.resize(paths);
  std::atomic<std::size_t> degenerate{0};
  parallel_for(paths, [&](std::size_t l) {
    CounterRng rng(seed, {kBackwardStream, static_cast<std::uint64_t>(l)});
    Matrix& path = out.paths[l];
    path.resize(static_cast<Index>(K) + 1, d);
    Vector weights = cloud.weights.row(static_cast<Index>(K)).transpose();
    std::size_t index = draw_index(weights, rng.uniform());
    path.row(static_cast<Index>(K)) = cloud.states[K].row(static_cast<Index>(index));
    Vector log_back(n);
    for (std::size_t t = K; t-- > 0;) {
      const Index ti = static_cast<Index>(t);
      const auto next = path.row(ti + 1);
      for (Index p = 0; p < n; ++p) {
        double q = 0.0;
        for (Index c = 0; c < d; ++c) {
          const double r = next(c) - means[t](p, c);
          q += r * r * half_precision(c);
        }
        log_back(p) = log_filter(ti, p) - q;
      }
      const double top = log_back.maxCoeff();
      if (std::isfinite(top)) {
        weights = (log_back.array() - top).exp().matrix();
      } else {
        weights = cloud.weights.row(ti).transpose();
        degenerate.fetch_add(1, std::memory_order_relaxed);
      }
      index = draw_index(weights, rng.uniform());
      path.row(ti) = cloud.states[t].row(static_cast<Index>(index));
    }
  });
  out.degenerate_steps = degenerate.load();
  return out;
}

Vector cloud_variance(const ParticleCloud& cloud) {
  const Index steps = static_cast<Index>(cloud.states.size());
  Vector out(steps);
  for (Index t = 0; t < steps; ++t) {
    const Matrix& x = cloud.states[static_cast<std::size_t>(t)];
    const Vector w = cloud.weights.row(t).transpose();
    const Eigen::RowVectorXd mean = w.transpose() * x;
    const Matrix centred = x.rowwise() - mean;
    out(t) = (w.transpose() * centred.array().square().matrix()).mean();
  }
  return out;
}

Vector path_variance(const SmoothedPaths& smoothed) {
  if (smoothed.paths.empty()) return {};
  const Index steps = smoothed.paths.front().rows();
  const Index d = smoothed.paths.front().cols();
  const double count = static_cast<double>(smoothed.paths.size());
  Vector out = Vector::Zero(steps);
  Matrix sum = Matrix::Zero(steps, d);
  Matrix sq = Matrix::Zero(steps, d);
  for (const Matrix& p : smoothed.paths) {
    sum += p;
    sq += p.array().square().matrix();
  }
  const Matrix mean = sum / count;
  out = ((sq / count).array() - mean.array().square()).cwiseMax(0.0).rowwise().mean().matrix();
  return out;
}

}  // namespace hawkesnet
