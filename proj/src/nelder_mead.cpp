#include "sirdc/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sirdc/error.hpp"

namespace sirdc {
namespace {

using Point = std::vector<double>;

double norm(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double diameter(const std::vector<Point>& simplex) {
  double d = 0.0;
  for (std::size_t a = 0; a < simplex.size(); ++a)
    for (std::size_t b = a + 1; b < simplex.size(); ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < simplex[a].size(); ++k) s += std::pow(simplex[a][k] - simplex[b][k], 2);
      d = std::max(d, std::sqrt(s));
    }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Point&)>& f, Point x0,
                             const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0) throw DataError("nelder_mead: empty start point");

  NelderMeadResult out;
  out.x = x0;
  out.value = f(x0);
  out.evaluations = 1;

  auto eval = [&](const Point& x) {
    ++out.evaluations;
    return f(x);
  };

  for (int round = 0; round <= opt.max_restarts; ++round) {
    const double start_value = out.value;
    std::vector<Point> simplex{out.x};
    std::vector<double> values{out.value};
    for (std::size_t k = 0; k < n; ++k) {
      Point p = out.x;
      p[k] += opt.initial_step;
      simplex.push_back(p);
      values.push_back(eval(p));
    }

    std::vector<std::size_t> order(n + 1);
    bool converged = false;
    while (out.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
      {
        std::vector<Point> s2;
        std::vector<double> v2;
        for (auto idx : order) {
          s2.push_back(simplex[idx]);
          v2.push_back(values[idx]);
        }
        simplex.swap(s2);
        values.swap(v2);
      }
      ++out.iterations;
      if (diameter(simplex) < opt.xtol_rel * std::max(1.0, norm(simplex[0]))) {
        converged = true;
        break;
      }

      Point centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[v][k] / static_cast<double>(n);
      auto along = [&](double coef) {
        Point p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (simplex[n][k] - centroid[k]);
        return p;
      };

      Point reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < values[0]) {
        Point expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[n] = std::move(expanded);
          values[n] = fe;
        } else {
          simplex[n] = std::move(reflected);
          values[n] = fr;
        }
        continue;
      }
      if (fr < values[n - 1]) {
        simplex[n] = std::move(reflected);
        values[n] = fr;
        continue;
      }
      const bool outside = fr < values[n];
      Point contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[n])) {
        simplex[n] = std::move(contracted);
        values[n] = fc;
        continue;
      }
      for (std::size_t v = 1; v <= n; ++v) {
        for (std::size_t k = 0; k < n; ++k) simplex[v][k] = simplex[0][k] + 0.5 * (simplex[v][k] - simplex[0][k]);
        values[v] = eval(simplex[v]);
      }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    if (values[best] <= out.value) {
      out.x = simplex[best];
      out.value = values[best];
    }
    out.converged = converged;
    if (!converged) break;
    // A restart that finds nothing new confirms the optimum.
    if (round > 0 && !(out.value < start_value - 1e-12 * std::abs(start_value))) break;
  }
  return out;
}

}  // namespace sirdc
