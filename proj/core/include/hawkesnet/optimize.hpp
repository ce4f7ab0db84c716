#pragma once

#include <cstddef>
#include <functional>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

struct NelderMeadOptions {
  /// Objective evaluations per start.
  std::size_t max_evals = 400;
  /// Additional starts from the best point with a fresh simplex.
  std::size_t restarts = 2;
  /// Initial simplex edge relative to |x|, with a floor of 1e-3.
  double initial_step = 0.1;
  /// Stop when the simplex value spread falls below ftol (1 + |f_best|).
  double ftol = 1e-10;
  /// Weight of the log-barrier on finite bounds.
  double barrier = 1e-8;
};

struct MinimizeResult {
  Vector x;
  /// Objective without the barrier term.
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Bounded Nelder-Mead minimization. Points outside [lower, upper] score
/// +inf; a small log-barrier keeps iterates away from finite bounds. The
/// starting point must be strictly inside.
[[nodiscard]] MinimizeResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                                         const Vector& lower, const Vector& upper,
                                         const NelderMeadOptions& options = {});

}  // namespace hawkesnet
