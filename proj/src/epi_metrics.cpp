#include "sirdc/epi_metrics.hpp"

#include "sirdc/error.hpp"

namespace sirdc {

std::string_view to_string(RiskLevel level) {
  switch (level) {
    case RiskLevel::kControllable: return "controllable";
    case RiskLevel::kModerate: return "moderate";
    case RiskLevel::kAlarming: return "alarming";
    case RiskLevel::kStronglyAlarming: return "strongly-alarming";
    case RiskLevel::kHazardous: return "hazardous";
  }
  return "unknown";
}

ReproductionNumbers reproduction_numbers(double beta, double s, const ModelParams& params) {
  const double r0 = beta / params.gamma;
  return {r0, r0 * s / params.population};
}

double contraction_probability(double beta, double i, double n) { return beta * i / n; }

RiskLevel classify_risk(double p) {
  if (p < 1e-5) return RiskLevel::kControllable;
  if (p < 1e-4) return RiskLevel::kModerate;
  if (p < 1e-3) return RiskLevel::kAlarming;
  if (p < 1e-2) return RiskLevel::kStronglyAlarming;
  return RiskLevel::kHazardous;
}

RiskSeries risk_series(const Trajectory& trajectory, const ModelParams& params) {
  RiskSeries out;
  for (std::size_t k = 0; k < trajectory.betas.size(); ++k) {
    const auto& st = trajectory.states[k];
    const double beta = trajectory.betas[k];
    const auto rn = reproduction_numbers(beta, st.s, params);
    const double poc = contraction_probability(beta, st.i, params.population);
    out.poc.push_back(poc);
    out.level.push_back(classify_risk(poc));
    out.r0.push_back(rn.r0);
    out.reff.push_back(rn.reff);
    out.infectious.push_back(st.i);
  }
  return out;
}

Counterfactual scenario_counterfactual(const FitResult& fit, double new_infectious_period, const ModelParams& params) {
  if (!(new_infectious_period > 0.0)) throw DataError("infectious period must be positive");
  if (fit.trajectory.size() < 2) throw DataError("counterfactual needs a fitted trajectory of at least two days");
  ModelParams p = params.with_population(params.population);
  p.gamma = 1.0 / new_infectious_period;
  Counterfactual out;
  out.gamma = p.gamma;
  out.trajectory = simulate_forward(fit.trajectory.states.front(), fit.trajectory.betas, p);
  out.risk = risk_series(out.trajectory, p);
  return out;
}

}  // namespace sirdc
