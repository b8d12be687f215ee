#include "sirdc/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sirdc/error.hpp"

namespace sirdc {

RootResult brent_root(const std::function<double(double)>& f, double lo, double hi, double ftol,
                      double xtol, int max_iter) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  RootResult out;
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("brent_root: root is not bracketed");

  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    out = {b, fb, it, false};
    if (fb == 0.0 || (std::abs(m) <= tol && std::abs(fb) <= ftol)) {
      out.converged = true;
      return out;
    }
    if (std::abs(m) <= 2.0 * eps * std::abs(b) + std::numeric_limits<double>::min()) {
      // Bracket exhausted in floating point; accept if the residual is small enough.
      out.converged = std::abs(fb) <= ftol;
      return out;
    }
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  out = {b, fb, max_iter, std::abs(fb) <= ftol};
  return out;
}

}  // namespace sirdc
