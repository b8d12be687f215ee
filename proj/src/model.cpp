#include "sirdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sirdc/error.hpp"

namespace sirdc {
namespace {

constexpr int kMaxSweeps = 200;
constexpr double kResidualTol = 1e-12;

std::vector<double> column(const std::vector<CompartmentState>& states, double CompartmentState::*m) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.*m);
  return out;
}

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

void ModelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DataError("gamma must be positive");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DataError("theta must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DataError("delta must lie in [0, 1]");
  if (!(population >= 1.0) || !std::isfinite(population)) throw DataError("population must be >= 1");
}

std::vector<double> Trajectory::susceptible() const { return column(states, &CompartmentState::s); }
std::vector<double> Trajectory::infectious() const { return column(states, &CompartmentState::i); }
std::vector<double> Trajectory::resolving() const { return column(states, &CompartmentState::r); }
std::vector<double> Trajectory::deceased() const { return column(states, &CompartmentState::d); }
std::vector<double> Trajectory::recovered() const { return column(states, &CompartmentState::c); }

CompartmentState forward_step(const CompartmentState& state, double beta, const ModelParams& params) {
  if (!(beta >= 0.0)) throw DataError("forward_step: beta must be non-negative");
  const double n2 = 2.0 * params.population;
  const double s0 = state.s;
  const double i0 = state.i;

  // Gauss-Seidel form: for a trial S(t+1), I(t+1) is explicit, leaving a
  // scalar fixed point S <- G(S) with G decreasing.
  auto infectious_next = [&](double s1) { return i0 * std::exp(beta * (s0 + s1) / n2 - params.gamma); };
  auto g = [&](double s1) { return s0 * std::exp(-beta * (i0 + infectious_next(s1)) / n2); };

  double s1 = s0;
  if (beta > 0.0 && i0 > 0.0 && s0 > 0.0) {
    double lambda = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    double res = prev;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const double target = g(s1);
      res = std::abs(target - s1) / s0;
      if (res <= 4.0 * std::numeric_limits<double>::epsilon()) break;
      if (res <= kResidualTol && res >= prev) break;
      if (res > prev) lambda *= 0.5;
      prev = std::min(prev, res);
      s1 += lambda * (target - s1);
    }
    res = std::abs(g(s1) - s1) / s0;
    if (!(res <= kResidualTol)) {
      throw NumericalError("forward_step: fixed-point iteration did not converge", state.day);
    }
  }

  CompartmentState next;
  next.day = state.day + 1;
  next.s = clamp_nonneg(s1);
  next.i = clamp_nonneg(beta > 0.0 ? infectious_next(s1) : i0 * std::exp(-params.gamma));
  const double half_theta = 0.5 * params.theta;
  next.r = clamp_nonneg((state.r * (1.0 - half_theta) + 0.5 * params.gamma * (state.i + next.i)) /
                        (1.0 + half_theta));
  const double resolved = half_theta * (state.r + next.r);
  next.d = clamp_nonneg(state.d + params.delta * resolved);
  next.c = clamp_nonneg(state.c + (1.0 - params.delta) * resolved);
  return next;
}

Trajectory simulate_forward(const CompartmentState& initial, std::span<const double> betas,
                            const ModelParams& params) {
  if (betas.empty()) throw DataError("simulate_forward: need at least one beta");
  Trajectory out;
  out.states.reserve(betas.size() + 1);
  out.states.push_back(initial);
  out.betas.assign(betas.begin(), betas.end());
  for (double b : betas) out.states.push_back(forward_step(out.states.back(), b, params));
  return out;
}

void fill_resolving_compartments(std::vector<CompartmentState>& states, const ModelParams& params) {
  const double half_theta = 0.5 * params.theta;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto& prev = states[k - 1];
    auto& cur = states[k];
    cur.r = clamp_nonneg((prev.r * (1.0 - half_theta) + 0.5 * params.gamma * (prev.i + cur.i)) /
                         (1.0 + half_theta));
    const double resolved = half_theta * (prev.r + cur.r);
    cur.d = clamp_nonneg(prev.d + params.delta * resolved);
    cur.c = clamp_nonneg(prev.c + (1.0 - params.delta) * resolved);
  }
}

namespace {

struct Derivative {
  double s, i, r, d, c;
};

Derivative rhs(double t, const CompartmentState& x, const BetaFunction& beta_fn, const ModelParams& p) {
  const double infection = beta_fn(t) * x.s * x.i / p.population;
  const double resolution = p.theta * x.r;
  return {-infection, infection - p.gamma * x.i, p.gamma * x.i - resolution, p.delta * resolution,
          (1.0 - p.delta) * resolution};
}

CompartmentState axpy(const CompartmentState& x, double h, const Derivative& k) {
  CompartmentState y = x;
  y.s += h * k.s;
  y.i += h * k.i;
  y.r += h * k.r;
  y.d += h * k.d;
  y.c += h * k.c;
  return y;
}

}  // namespace

Trajectory rk4_reference(const CompartmentState& initial, const BetaFunction& beta_fn,
                         const ModelParams& params, int horizon, double step) {
  if (horizon < 1) throw DataError("rk4_reference: horizon must be >= 1");
  if (!(step > 0.0) || step > 1.0) throw DataError("rk4_reference: step must lie in (0, 1]");
  const long substeps = std::lround(1.0 / step);
  if (std::abs(static_cast<double>(substeps) * step - 1.0) > 1e-12)
    throw DataError("rk4_reference: step must divide one day");
  const double h = 1.0 / static_cast<double>(substeps);

  Trajectory out;
  out.states.reserve(static_cast<std::size_t>(horizon) + 1);
  out.states.push_back(initial);
  CompartmentState x = initial;
  for (int day = 0; day < horizon; ++day) {
    const double t0 = static_cast<double>(initial.day + day);
    out.betas.push_back(beta_fn(t0 + 0.5));
    for (long k = 0; k < substeps; ++k) {
      const double t = t0 + static_cast<double>(k) * h;
      const Derivative k1 = rhs(t, x, beta_fn, params);
      const Derivative k2 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1), beta_fn, params);
      const Derivative k3 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2), beta_fn, params);
      const Derivative k4 = rhs(t + h, axpy(x, h, k3), beta_fn, params);
      x.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
      x.i += h / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
      x.r += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
      x.d += h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
      x.c += h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
    }
    x.day = initial.day + day + 1;
    out.states.push_back(x);
  }
  return out;
}

}  // namespace sirdc
