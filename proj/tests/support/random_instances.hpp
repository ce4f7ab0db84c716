#pragma once

#include <cstdint>
#include <random>

#include "hawkesnet/types.hpp"

namespace hawkesnet::testing {

inline CountSeries random_counts(std::mt19937_64& gen, int K, int m, int max_count = 3,
                                 double dt = 1.0) {
  std::uniform_int_distribution<int> pick(0, max_count);
  CountMatrix c(K, m);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < m; ++i) c(k, i) = pick(gen);
  }
  return CountSeries::from_counts(c, dt);
}

inline HawkesParams random_params(std::mt19937_64& gen, int m, bool per_pair = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HawkesParams p;
  p.mu = Vector(m);
  p.alpha = Matrix(m, m);
  Matrix g(m, m);
  for (int i = 0; i < m; ++i) {
    p.mu(i) = 0.1 + 2.0 * u(gen);
    for (int j = 0; j < m; ++j) {
      p.alpha(i, j) = 0.5 * u(gen);
      g(i, j) = 0.05 + 0.9 * u(gen);
    }
  }
  if (per_pair) {
    p.gamma = DecaySpec::per_pair(g);
  } else {
    p.gamma = DecaySpec::per_node(g.col(0));
  }
  return p;
}

inline HawkesParams scalar_params(double mu, double alpha, double gamma) {
  HawkesParams p;
  p.mu = Vector::Constant(1, mu);
  p.alpha = Matrix::Constant(1, 1, alpha);
  p.gamma = DecaySpec::scalar(gamma, 1);
  return p;
}

}  // namespace hawkesnet::testing
