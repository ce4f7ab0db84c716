#include "hawkesnet/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace hawkesnet::fixtures {

Vector nine_node_mu() {
  Vector mu(9);
  mu << 5.0, 4.6, 4.2, 0.5, 0.46, 0.42, 0.38, 0.34, 0.3;
  return mu;
}

HawkesParams nine_node_truth(int which) {
  Matrix alpha = Matrix::Zero(9, 9);
  switch (which) {
    case 1:
      alpha.diagonal().setConstant(0.4);
      break;
    case 2:
      for (int b = 0; b < 3; ++b) alpha.block(3 * b, 3 * b, 3, 3).setConstant(0.2);
      break;
    case 3: {
      const struct {
        int i, j;
        double w;
      } edges[] = {{0, 0, 0.3}, {0, 4, 0.25}, {1, 1, 0.35}, {1, 7, 0.2}, {2, 0, 0.3},  {2, 2, 0.25},
                   {3, 5, 0.4}, {4, 4, 0.3},  {4, 8, 0.2},  {5, 3, 0.35}, {5, 5, 0.2}, {6, 1, 0.3},
                   {6, 6, 0.25}, {7, 2, 0.3}, {8, 6, 0.35}, {8, 8, 0.2}};
      for (const auto& e : edges) alpha(e.i, e.j) = e.w;
      break;
    }
    default:
      throw std::invalid_argument("9-node ground truth must be 1, 2 or 3");
  }
  return HawkesParams{nine_node_mu(), alpha, DecaySpec::scalar(kNineNodeGamma, 9)};
}

std::vector<std::pair<std::size_t, std::size_t>> support(const Matrix& alpha) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (Eigen::Index i = 0; i < alpha.rows(); ++i)
    for (Eigen::Index j = 0; j < alpha.cols(); ++j)
      if (alpha(i, j) != 0.0) out.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

}  // namespace hawkesnet::fixtures

namespace hawkesnet::fixtures {

StateSpaceSpec lgcp_truth() { return StateSpaceSpec::univariate(1.5, 0.5, 2.5, 0.5, 1.5, 0.1); }

StateSpaceSpec lgcp_init() { return StateSpaceSpec::univariate(3.0, 0.25, 1.25, 0.25, 0.75, 0.1); }

StateSpaceSpec logistic_truth() { return StateSpaceSpec::logistic(0.5, 0.5, 0.25, 9.0, 0.5, 12.0, 4.0, 0.1); }

StateSpaceSpec logistic_init() { return StateSpaceSpec::logistic(1.0, 0.25, 0.5, 4.5, 1.0, 24.0, 8.0, 0.1); }

StateSpaceSpec network_truth() {
  Matrix alpha(3, 3);
  alpha << 3.0, 0.0, 2.0,
           2.0, 3.0, 0.0,
           0.0, 2.5, 3.0;
  return StateSpaceSpec::network(Vector::Constant(3, 0.5), Vector::Constant(3, 5.0), Vector::Constant(3, 0.125),
                                 Vector::Constant(3, 0.1), alpha, Vector::Constant(3, 9.0), 0.1);
}

StateSpaceSpec network_init() {
  StateSpaceSpec s = network_truth();
  s.alpha.setConstant(0.9);
  return s;
}

GaussianPrior network_initial_prior() {
  return {Vector::Zero(3), Vector::Constant(3, std::sqrt(5.0 * 0.125))};
}

}  // namespace hawkesnet::fixtures

namespace hawkesnet::fixtures {

Matrix abm_pattern() {
  constexpr int m = 64;
  Matrix W = Matrix::Zero(m, m);
  for (int s = 0; s < m; ++s) {
    W(s, (s + m - 1) % m) = 1.0;
    if (s % 8 == 1 || s % 8 == 2) W(s, (s + m - 4) % m) = 1.0;
    if (s % 8 == 2) W(s, (s + m - 2) % m) = 1.0;
  }
  return W;
}

AbmConfig abm_case(int which, std::uint64_t seed) {
  if (which != 1 && which != 2) throw std::invalid_argument("ABM case must be 1 or 2");
  const bool strong = which == 1;
  AbmConfig c;
  c.W = abm_pattern() * (strong ? 3.0 : 0.5);
  c.A0 = Vector::Constant(64, kAbmBaseline);
  c.omega = Vector::Constant(64, 5.0);
  c.eta = Vector::Constant(64, strong ? 0.25 : 1.0);
  c.Gamma = Vector::Constant(64, strong ? 3.0 : 0.5);
  c.dt = 0.05;
  c.seed = seed;
  return c;
}

}  // namespace hawkesnet::fixtures
