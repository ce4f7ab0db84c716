#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

enum class ModelKind { lgcp_univariate, lgcp_logistic, lgcp_network };

[[nodiscard]] ModelKind parse_model_kind(const std::string& name);
[[nodiscard]] std::string model_kind_name(ModelKind kind);

/// Which parameter families the EM updates; frozen families keep their value.
struct ParameterMask {
  bool mu = true;
  bool omega1 = true;
  bool epsilon = true;
  bool eta = true;
  bool alpha = true;
  bool omega2 = true;
  bool A = true;
  bool B = true;
};

/// Cox process driven by an Ornstein-Uhlenbeck state x and a count-driven
/// excitation g:
///   x_k = Psi(x_{k-1}) + eps sqrt(dt) z_k,
///   g_k = (1 - omega2 dt) g_{k-1} + alpha n_{k-1},
///   lambda_k = exp(x_k) + g_k              (LGCP, network)
///   lambda_k = A / (1 + B exp(-(exp(x_k) + g_k)))   (logistic).
/// For the network, Psi_i(x) = [(1 - eta_i) x_i + eta_i sum_{j != i} x_j]
/// (1 - omega1_i dt) + omega1_i mu_i dt.
struct StateSpaceSpec {
  ModelKind kind = ModelKind::lgcp_univariate;
  double dt = 0.1;
  Vector mu;
  Vector omega1;
  Vector epsilon;
  /// Diffusion weights (network only; zero otherwise).
  Vector eta;
  Matrix alpha;
  Vector omega2;
  double A = 1.0;
  double B = 1.0;
  ParameterMask estimate;

  [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(mu.size()); }
  void validate() const;

  /// Flat parameter vector: univariate and logistic use
  /// [mu, omega1, eps, alpha, omega2(, A, B)]; the network stacks
  /// mu, omega1, eps, eta, alpha (row-major) and omega2.
  [[nodiscard]] Vector parameter_vector() const;

  [[nodiscard]] static StateSpaceSpec univariate(double mu, double omega1, double epsilon,
                                                 double alpha, double omega2, double dt);
  [[nodiscard]] static StateSpaceSpec logistic(double mu, double omega1, double epsilon,
                                               double alpha, double omega2, double A, double B,
                                               double dt);
  [[nodiscard]] static StateSpaceSpec network(const Vector& mu, const Vector& omega1,
                                              const Vector& epsilon, const Vector& eta,
                                              const Matrix& alpha, const Vector& omega2, double dt);
};

/// Deterministic part of the state transition.
[[nodiscard]] Vector transition_mean(const StateSpaceSpec& spec, const Vector& x_prev);

/// One transition with the given standard-normal noise vector.
[[nodiscard]] Vector transition(const StateSpaceSpec& spec, const Vector& x_prev, const Vector& noise);

/// log N(x; Psi(x_prev), eps^2 dt), summed over nodes.
[[nodiscard]] double transition_log_density(const StateSpaceSpec& spec, const Vector& x,
                                            const Vector& x_prev);

/// g_k from g_{k-1} and the counts of bin k - 1.
[[nodiscard]] Vector g_recursion(const StateSpaceSpec& spec, const Vector& g_prev,
                                 const Vector& counts_prev);

/// K x m excitation paths: row r is g for count row r, starting from g = 0
/// before the first bin (the count preceding the first bin is zero).
[[nodiscard]] Matrix g_paths(const StateSpaceSpec& spec, const CountSeries& counts);

/// Intensity of node i. Exponentials are evaluated with arguments clamped
/// to [-700, 700].
[[nodiscard]] double link(const StateSpaceSpec& spec, std::size_t i, double x, double g);

struct StateSpaceSimulation {
  CountSeries counts;
  /// (K + 1) x m states, row 0 is x_0.
  Matrix states;
  /// K x m intensities for the count rows.
  Matrix intensity;
};

[[nodiscard]] StateSpaceSimulation simulate_state_space(const StateSpaceSpec& spec, std::size_t steps,
                                                        const Vector& x0, std::uint64_t seed);

}  // namespace hawkesnet
