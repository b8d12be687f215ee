#pragma once

#include <span>
#include <vector>

#include "sirdc/model.hpp"

namespace sirdc {

/// Upper end of the admissible transmission-rate bracket (R0 = 50 at gamma = 0.2).
inline constexpr double kBetaMax = 10.0;

struct BetaStep {
  double beta = 0.0;
  double residual = 0.0;  ///< root condition evaluated at beta
  bool capped = false;    ///< no sign change on [0, kBetaMax]; beta pinned at the cap
};

/// Recovers the rate that carries the susceptible count from s1 to s2 in one
/// day given i1 infectious at the start of the day, by solving
///   s2/s1 - exp(-beta*i1/(2N) * (1 + exp(beta*(s1+s2)/(2N) - gamma))) = 0
/// on [0, kBetaMax]. The left side is increasing in beta, so the root is unique.
///
/// Throws DataError when s2 > s1 and InfeasibleError when i1 == 0 but s2 < s1.
BetaStep solve_beta_step(double s1, double s2, double i1, const ModelParams& params);

struct BetaRecovery {
  std::vector<double> betas;       ///< length T-1, rate at day t + 0.5
  std::vector<double> infectious;  ///< length T, infectious[0] == i1
  std::vector<double> residuals;   ///< per-day root residual
  std::vector<int> capped_days;    ///< 1-based days where beta hit kBetaMax
};

/// Sliding-window recovery over a susceptible series. Day k uses the window
/// (S(k), S(k+1)) and the infectious count carried from the previous day.
/// Errors from solve_beta_step are rethrown carrying the 1-based day.
BetaRecovery recover_beta_series(std::span<const double> susceptibles, double i1, const ModelParams& params);

}  // namespace sirdc
