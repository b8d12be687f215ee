#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sirdc {

/// Fixed SIRDC rates for one region plus its population.
struct ModelParams {
  double gamma = 0.2;     ///< inverse infectious period, 1/day
  double theta = 0.1;     ///< inverse resolving period, 1/day
  double delta = 0.0066;  ///< fatality fraction of resolved cases
  double population = 1.0;

  /// Throws DataError when a rate or the population is out of range.
  void validate() const;

  ModelParams with_population(double n) const {
    ModelParams p = *this;
    p.population = n;
    return p;
  }
};

/// Susceptible, infectious, resolving, deceased and recovered counts on one day.
struct CompartmentState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double d = 0.0;
  double c = 0.0;
  int day = 1;

  double total() const { return s + i + r + d + c; }
};

/// Consecutive daily states. `betas[k]` is the rate in force between
/// `states[k]` and `states[k+1]`, i.e. at the midpoint day + 0.5.
struct Trajectory {
  std::vector<CompartmentState> states;
  std::vector<double> betas;

  std::size_t size() const { return states.size(); }
  std::vector<double> susceptible() const;
  std::vector<double> infectious() const;
  std::vector<double> resolving() const;
  std::vector<double> deceased() const;
  std::vector<double> recovered() const;
};

/// Advances one day with the midpoint discretization. The implicit
/// (S, I) pair is solved by damped fixed-point iteration; R, D and C follow in
/// closed form. Throws NumericalError (carrying the day) if the iteration
/// does not reach a 1e-12 relative residual within 200 sweeps.
CompartmentState forward_step(const CompartmentState& state, double beta, const ModelParams& params);

/// Applies forward_step once per beta. Returns betas.size() + 1 states.
Trajectory simulate_forward(const CompartmentState& initial, std::span<const double> betas,
                            const ModelParams& params);

/// R, D and C from a known infectious series (midpoint rule for the linear
/// compartments). `out` must already hold the S and I columns.
void fill_resolving_compartments(std::vector<CompartmentState>& states, const ModelParams& params);

using BetaFunction = std::function<double(double)>;

/// Classical fixed-step RK4 on the continuous system, reported at integer
/// days day0 .. day0 + horizon. `step` must divide one day (1, 0.5, 0.1, ...).
/// `betas` in the returned trajectory are beta_fn(t + 0.5) for reference.
Trajectory rk4_reference(const CompartmentState& initial, const BetaFunction& beta_fn,
                         const ModelParams& params, int horizon, double step);

}  // namespace sirdc
