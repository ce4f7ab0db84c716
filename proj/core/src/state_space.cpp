#include "hawkesnet/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

double safe_exp(double v) { return std::exp(std::clamp(v, -700.0, 700.0)); }

void require_size(const Vector& v, Index m, const char* name) {
  if (v.size() != m) throw std::invalid_argument(std::string(name) + " must have one entry per node");
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "lgcp" || name == "lgcp_univariate") return ModelKind::lgcp_univariate;
  if (name == "lgcp-logistic" || name == "lgcp_logistic") return ModelKind::lgcp_logistic;
  if (name == "lgcp-network" || name == "lgcp_network") return ModelKind::lgcp_network;
  throw std::invalid_argument("unknown model '" + name + "'");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::lgcp_univariate: return "lgcp";
    case ModelKind::lgcp_logistic: return "lgcp-logistic";
    case ModelKind::lgcp_network: return "lgcp-network";
  }
  return "lgcp";
}

void StateSpaceSpec::validate() const {
  const Index m = mu.size();
  if (m < 1) throw std::invalid_argument("state-space model needs at least one node");
  if (kind != ModelKind::lgcp_network && m != 1) {
    throw std::invalid_argument("univariate models have exactly one node");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  require_size(omega1, m, "omega1");
  require_size(epsilon, m, "epsilon");
  require_size(omega2, m, "omega2");
  require_size(eta, m, "eta");
  if (alpha.rows() != m || alpha.cols() != m) throw std::invalid_argument("alpha must be m x m");
  for (Index i = 0; i < m; ++i) {
    const std::string at = "[" + std::to_string(i) + "]";
    if (!(mu(i) > 0.0)) throw std::invalid_argument("mu" + at + " must be positive");
    if (!(epsilon(i) > 0.0)) throw std::invalid_argument("epsilon" + at + " must be positive");
    if (!(omega1(i) > 0.0 && omega1(i) * dt < 1.0)) {
      throw std::invalid_argument("omega1" + at + " must satisfy 0 < omega1 dt < 1");
    }
    if (!(omega2(i) > 0.0 && omega2(i) * dt < 1.0)) {
      throw std::invalid_argument("omega2" + at + " must satisfy 0 < omega2 dt < 1");
    }
    if (kind == ModelKind::lgcp_network) {
      if (!(eta(i) >= 0.0 && eta(i) < 1.0)) throw std::invalid_argument("eta" + at + " must lie in [0, 1)");
    } else if (eta(i) != 0.0) {
      throw std::invalid_argument("eta applies to the network model only");
    }
  }
  if (!(alpha.array() >= 0.0).all() || !alpha.allFinite()) {
    throw std::invalid_argument("alpha must be finite and non-negative");
  }
  if (kind == ModelKind::lgcp_logistic && !(A > 0.0 && B > 0.0)) {
    throw std::invalid_argument("logistic link needs A > 0 and B > 0");
  }
}

Vector StateSpaceSpec::parameter_vector() const {
  const Index m = mu.size();
  if (kind != ModelKind::lgcp_network) {
    Vector v(kind == ModelKind::lgcp_logistic ? 7 : 5);
    v.head(5) << mu(0), omega1(0), epsilon(0), alpha(0, 0), omega2(0);
    if (kind == ModelKind::lgcp_logistic) v.tail(2) << A, B;
    return v;
  }
  Vector v(5 * m + m * m);
  v << mu, omega1, epsilon, eta, alpha.transpose().reshaped(), omega2;
  return v;
}

StateSpaceSpec StateSpaceSpec::univariate(double mu, double omega1, double epsilon, double alpha,
                                          double omega2, double dt) {
  StateSpaceSpec s;
  s.kind = ModelKind::lgcp_univariate;
  s.dt = dt;
  s.mu = Vector::Constant(1, mu);
  s.omega1 = Vector::Constant(1, omega1);
  s.epsilon = Vector::Constant(1, epsilon);
  s.eta = Vector::Zero(1);
  s.alpha = Matrix::Constant(1, 1, alpha);
  s.omega2 = Vector::Constant(1, omega2);
  s.estimate.eta = false;
  s.estimate.A = false;
  s.estimate.B = false;
  return s;
}

StateSpaceSpec StateSpaceSpec::logistic(double mu, double omega1, double epsilon, double alpha,
                                        double omega2, double A, double B, double dt) {
  StateSpaceSpec s = univariate(mu, omega1, epsilon, alpha, omega2, dt);
  s.kind = ModelKind::lgcp_logistic;
  s.A = A;
  s.B = B;
  s.estimate.A = true;
  s.estimate.B = true;
  return s;
}

StateSpaceSpec StateSpaceSpec::network(const Vector& mu, const Vector& omega1, const Vector& epsilon,
                                       const Vector& eta, const Matrix& alpha, const Vector& omega2,
                                       double dt) {
  StateSpaceSpec s;
  s.kind = ModelKind::lgcp_network;
  s.dt = dt;
  s.mu = mu;
  s.omega1 = omega1;
  s.epsilon = epsilon;
  s.eta = eta;
  s.alpha = alpha;
  s.omega2 = omega2;
  s.estimate.A = false;
  s.estimate.B = false;
  return s;
}

Vector transition_mean(const StateSpaceSpec& spec, const Vector& x_prev) {
  const Index m = spec.mu.size();
  Vector out(m);
  const double total = x_prev.sum();
  for (Index i = 0; i < m; ++i) {
    const double mixed = spec.kind == ModelKind::lgcp_network
                             ? (1.0 - spec.eta(i)) * x_prev(i) + spec.eta(i) * (total - x_prev(i))
                             : x_prev(i);
    const double keep = 1.0 - spec.omega1(i) * spec.dt;
    out(i) = mixed * keep + spec.omega1(i) * spec.mu(i) * spec.dt;
  }
  return out;
}

Vector transition(const StateSpaceSpec& spec, const Vector& x_prev, const Vector& noise) {
  return transition_mean(spec, x_prev) +
         (spec.epsilon * std::sqrt(spec.dt)).cwiseProduct(noise);
}

double transition_log_density(const StateSpaceSpec& spec, const Vector& x, const Vector& x_prev) {
  const Vector mean = transition_mean(spec, x_prev);
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double var = spec.epsilon(i) * spec.epsilon(i) * spec.dt;
    const double r = x(i) - mean(i);
    total += -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * r * r / var;
  }
  return total;
}

Vector g_recursion(const StateSpaceSpec& spec, const Vector& g_prev, const Vector& counts_prev) {
  const Vector keep = (1.0 - spec.omega2.array() * spec.dt).matrix();
  return keep.cwiseProduct(g_prev) + spec.alpha * counts_prev;
}

Matrix g_paths(const StateSpaceSpec& spec, const CountSeries& counts) {
  const Index K = counts.counts.rows();
  const Index m = spec.mu.size();
  if (counts.counts.cols() != m) throw std::invalid_argument("counts do not match model nodes");
  Matrix g = Matrix::Zero(K, m);
  const std::vector<char> starts = counts.segment_start_mask();
  for (Index r = 1; r < K; ++r) {
    if (starts[static_cast<std::size_t>(r)]) continue;
    g.row(r) = g_recursion(spec, g.row(r - 1).transpose(),
                           counts.counts.row(r - 1).cast<double>().transpose())
                   .transpose();
  }
  return g;
}

double link(const StateSpaceSpec& spec, std::size_t i, double x, double g) {
  (void)i;
  const double z = safe_exp(x) + g;
  if (spec.kind == ModelKind::lgcp_logistic) return spec.A / (1.0 + spec.B * safe_exp(-z));
  return z;
}

StateSpaceSimulation simulate_state_space(const StateSpaceSpec& spec, std::size_t steps,
                                          const Vector& x0, std::uint64_t seed) {
  spec.validate();
  const Index m = spec.mu.size();
  const Index K = static_cast<Index>(steps);
  if (x0.size() != m) throw std::invalid_argument("initial state must have one entry per node");
  StateSpaceSimulation out;
  out.counts = CountSeries::from_counts(CountMatrix::Zero(K, m), spec.dt);
  out.states.resize(K + 1, m);
  out.intensity.resize(K, m);
  out.states.row(0) = x0.transpose();
  CounterRng noise_rng(seed, {0x55ULL, 1});
  CounterRng count_rng(seed, {0x55ULL, 2});
  Vector x = x0;
  Vector g = Vector::Zero(m);
  Vector noise(m);
  for (Index r = 0; r < K; ++r) {
    for (Index i = 0; i < m; ++i) noise(i) = noise_rng.normal();
    x = transition(spec, x, noise);
    out.states.row(r + 1) = x.transpose();
    if (r > 0) g = g_recursion(spec, g, out.counts.counts.row(r - 1).cast<double>().transpose());
    for (Index i = 0; i < m; ++i) {
      const double lam = link(spec, static_cast<std::size_t>(i), x(i), g(i));
      out.intensity(r, i) = lam;
      out.counts.counts(r, i) = count_rng.poisson(lam * spec.dt);
    }
  }
  return out;
}

}  // namespace hawkesnet
