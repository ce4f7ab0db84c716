#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hawkesnet/abm.hpp"
#include "hawkesnet/particle.hpp"
#include "hawkesnet/state_space.hpp"
#include "hawkesnet/types.hpp"

/// Ground-truth parameter sets shared by the tests, the acceptance suite and
/// the `reproduce` subcommand.
namespace hawkesnet::fixtures {

/// Baselines of the 9-node experiment.
[[nodiscard]] Vector nine_node_mu();

/// Decay used by the 9-node experiment.
inline constexpr double kNineNodeGamma = 0.175;

/// 9-node ground truths: 1 = self-excitation only, 2 = three 3-node
/// communities, 3 = sparse directed network.
[[nodiscard]] HawkesParams nine_node_truth(int which);

/// Nonzero pattern of an excitation matrix.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> support(const Matrix& alpha);

/// Univariate LGCP with self-excitation: truth, EM starting point, and the
/// simulation setup (dt = 0.1, K = 4000, x_0 = 1.5).
[[nodiscard]] StateSpaceSpec lgcp_truth();
[[nodiscard]] StateSpaceSpec lgcp_init();
inline constexpr std::size_t kLgcpSteps = 4000;
inline constexpr double kLgcpX0 = 1.5;

/// Logistic-link LGCP (dt = 0.1, K = 2000, x_0 = 1).
[[nodiscard]] StateSpaceSpec logistic_truth();
[[nodiscard]] StateSpaceSpec logistic_init();
inline constexpr std::size_t kLogisticSteps = 2000;
inline constexpr double kLogisticX0 = 1.0;

/// 3-node LGCP network with diffusion. The EM start uses alpha = 0.9
/// everywhere and the true values elsewhere; x_0 is drawn from
/// N(0, 5 eps) (variance).
[[nodiscard]] StateSpaceSpec network_truth();
[[nodiscard]] StateSpaceSpec network_init();
[[nodiscard]] GaussianPrior network_initial_prior();

/// 64-node influence pattern (0/1): a directed ring s-1 -> s plus chords
/// s-4 -> s for s = 1, 2 (mod 8) and s-2 -> s for s = 2 (mod 8), giving
/// rows with one, two or three sources. The adjacency spectral radius is
/// about 1.26, so the fully diffusive update (eta = 1) stays contractive.
[[nodiscard]] Matrix abm_pattern();

/// Strong-excitation case (w = 3, eta = 0.25, Gamma = 3) and
/// weak-excitation, strong-diffusion case (w = 0.5, eta = 1, Gamma = 0.5);
/// both with dt = 0.05, omega = 5 and A0 = kAbmBaseline.
[[nodiscard]] AbmConfig abm_case(int which, std::uint64_t seed = 0);
inline constexpr double kAbmBaseline = 1.0;

}  // namespace hawkesnet::fixtures
