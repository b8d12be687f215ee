#pragma once

#include <functional>

namespace sirdc {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;  ///< f(root)
  int iterations = 0;
  bool converged = false;
};

/// Brent's bracketed root finder (bisection / secant / inverse quadratic).
/// Requires f(lo) and f(hi) of opposite sign (or one of them zero). Stops
/// when |f| <= ftol and the bracket has shrunk to xtol, or when the bracket
/// cannot shrink further in floating point.
RootResult brent_root(const std::function<double(double)>& f, double lo, double hi, double ftol,
                      double xtol = 0.0, int max_iter = 200);

}  // namespace sirdc
