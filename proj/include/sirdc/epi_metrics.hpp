#pragma once

#include <string_view>
#include <vector>

#include "sirdc/calibration.hpp"
#include "sirdc/model.hpp"

namespace sirdc {

enum class RiskLevel { kControllable, kModerate, kAlarming, kStronglyAlarming, kHazardous };

std::string_view to_string(RiskLevel level);

struct ReproductionNumbers {
  double r0 = 0.0;
  double reff = 0.0;
};

/// R0 = beta / gamma, Reff = R0 * S / N.
ReproductionNumbers reproduction_numbers(double beta, double s, const ModelParams& params);

/// Daily probability of contracting the virus for a susceptible individual: beta * I / N.
double contraction_probability(double beta, double i, double n);

/// Daily-PoC risk bucket with cut points 0.001%, 0.01%, 0.1%, 1%. A value on a
/// cut point belongs to the higher-risk bucket.
RiskLevel classify_risk(double p);

/// Per-day derived series for a trajectory (days 1 .. T-1, aligned to betas).
struct RiskSeries {
  std::vector<double> poc;
  std::vector<RiskLevel> level;
  std::vector<double> r0;
  std::vector<double> reff;
  std::vector<double> infectious;
};
RiskSeries risk_series(const Trajectory& trajectory, const ModelParams& params);

struct Counterfactual {
  double gamma = 0.0;  ///< the substituted inverse infectious period
  Trajectory trajectory;
  RiskSeries risk;
};

/// Re-simulates the whole window from the fitted day-one state with
/// gamma' = 1 / new_infectious_period and the fitted betas held fixed.
Counterfactual scenario_counterfactual(const FitResult& fit, double new_infectious_period, const ModelParams& params);

}  // namespace sirdc
