#pragma once

#include <functional>
#include <vector>

namespace sirdc {

struct NelderMeadOptions {
  double initial_step = 0.5;  ///< edge length of the starting simplex
  double xtol_rel = 1e-4;     ///< stop when the simplex diameter falls below xtol_rel * max(1, |x_best|)
  int max_evaluations = 2000;
  int max_restarts = 2;  ///< rebuild the simplex around the optimum this many times
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 1/2, 1/2). Deterministic.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace sirdc
