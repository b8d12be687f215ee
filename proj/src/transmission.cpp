#include "sirdc/transmission.hpp"

#include <cmath>
#include <string>

#include "sirdc/error.hpp"
#include "sirdc/roots.hpp"

namespace sirdc {
namespace {

constexpr double kRootTol = 1e-12;

std::string at_day(const char* what, int day) {
  return day > 0 ? std::string(what) + " (day " + std::to_string(day) + ")" : std::string(what);
}

BetaStep solve_step(double s1, double s2, double i1, const ModelParams& params, int day) {
  if (!(s1 > 0.0) || !(s2 >= 0.0)) throw DataError(at_day("susceptible counts must be positive", day));
  if (!(i1 >= 0.0)) throw DataError(at_day("infectious count must be non-negative", day));
  if (s2 > s1) throw DataError(at_day("susceptible series increases; repair the input first", day));
  if (s2 == s1) return {};
  if (i1 == 0.0) throw InfeasibleError("susceptibles decline with no infectious individuals", day);

  const double n2 = 2.0 * params.population;
  const double ratio = s2 / s1;
  auto f = [&](double beta) {
    return ratio - std::exp(-beta * i1 / n2 * (1.0 + std::exp(beta * (s1 + s2) / n2 - params.gamma)));
  };
  const double f_hi = f(kBetaMax);
  if (f_hi < 0.0) return {kBetaMax, f_hi, true};

  // Tight bracket tolerance: the residual scale is i1/N, so |f| <= 1e-12 alone
  // leaves beta uncertain at the 1e-8 level for small outbreaks.
  RootResult root = brent_root(f, 0.0, kBetaMax, kRootTol, 0.0);
  if (!root.converged) throw NumericalError("beta root finder did not converge", day);
  return {root.root, root.residual, false};
}

}  // namespace

BetaStep solve_beta_step(double s1, double s2, double i1, const ModelParams& params) {
  return solve_step(s1, s2, i1, params, 0);
}

BetaRecovery recover_beta_series(std::span<const double> susceptibles, double i1, const ModelParams& params) {
  if (susceptibles.size() < 2) throw DataError("recover_beta_series: need at least two days");
  if (!(i1 >= 0.0)) throw DataError("recover_beta_series: initial infectious count must be non-negative");
  const std::size_t T = susceptibles.size();
  const double n2 = 2.0 * params.population;

  BetaRecovery out;
  out.betas.reserve(T - 1);
  out.residuals.reserve(T - 1);
  out.infectious.reserve(T);
  out.infectious.push_back(i1);

  double infectious = i1;
  for (std::size_t k = 0; k + 1 < T; ++k) {
    const double s1 = susceptibles[k];
    const double s2 = susceptibles[k + 1];
    const int day = static_cast<int>(k) + 1;
    const BetaStep step = solve_step(s1, s2, infectious, params, day);
    infectious *= std::exp(step.beta * (s1 + s2) / n2 - params.gamma);
    out.betas.push_back(step.beta);
    out.residuals.push_back(step.residual);
    if (step.capped) out.capped_days.push_back(day);
    out.infectious.push_back(infectious);
  }
  return out;
}

}  // namespace sirdc
