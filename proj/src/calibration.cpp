#include "sirdc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sirdc/error.hpp"
#include "sirdc/transmission.hpp"

namespace sirdc {

CaseInputs CountyData::case_inputs() const {
  return CaseInputs::from_cumulative(cumulative_confirmed, positivity, population);
}

Date select_day_one(const RegionSeries& region, Date floor) {
  if (region.size() == 0) throw NotFittableError("region " + region.region_id + " has no observations");
  for (std::size_t k = 0; k < region.size(); ++k) {
    if (region.cumulative_confirmed[k] >= kCaseThreshold) return std::max(region.dates[k], floor);
  }
  throw NotFittableError("region " + region.region_id + " never reaches 5 confirmed cases");
}

CountyData county_window(const RegionSeries& region, Date day_one, const Date* last) {
  const long first = region.index_of(day_one);
  if (first < 0) throw DataError("region " + region.region_id + " has no data on day one " + format_date(day_one));
  long end = static_cast<long>(region.size()) - 1;
  if (last != nullptr) {
    end = region.index_of(*last);
    if (end < first) throw DataError("region " + region.region_id + " has no data through " + format_date(*last));
  }
  if (region.positivity.size() != region.size())
    throw DataError("region " + region.region_id + " has no joined positivity series");

  CountyData out;
  out.region_id = region.region_id;
  out.day_one = day_one;
  out.population = region.population;
  auto slice = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + first, v.begin() + end + 1);
  };
  out.cumulative_confirmed = slice(region.cumulative_confirmed);
  out.cumulative_deaths = slice(region.cumulative_deaths);
  out.positivity = slice(region.positivity);
  return out;
}

Reconstruction reconstruct(double i1, double r1, const CountyData& data, double alpha, const ModelParams& params) {
  if (data.size() == 0) throw DataError("empty county window");
  const ModelParams p = params.with_population(data.population);
  const CaseInputs inputs = data.case_inputs();

  CompartmentState first;
  first.i = i1;
  first.r = r1;
  first.d = data.cumulative_deaths.front();
  first.c = 0.0;

  Reconstruction out;
  out.omega = compute_omega(inputs.positivity.front(), alpha, inputs.cumulative_confirmed.front(), first);
  const std::vector<double> s = build_susceptible_series(inputs, {alpha, out.omega});

  std::vector<CompartmentState>& states = out.trajectory.states;
  states.resize(s.size());
  std::vector<double> infectious{i1};
  if (s.size() >= 2) {
    BetaRecovery rec = recover_beta_series(s, i1, p);
    infectious = std::move(rec.infectious);
    out.trajectory.betas = std::move(rec.betas);
    out.capped_days = std::move(rec.capped_days);
  }
  for (std::size_t t = 0; t < s.size(); ++t) {
    states[t].day = static_cast<int>(t) + 1;
    states[t].s = s[t];
    states[t].i = infectious[t];
  }
  states[0].r = first.r;
  states[0].d = first.d;
  states[0].c = first.c;
  fill_resolving_compartments(states, p);
  return out;
}

namespace {

double weighted_death_loss(const CountyData& data, const Trajectory& traj) {
  const std::size_t T = data.size();
  double loss = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    const double e = (data.cumulative_deaths[k] - traj.states[k].d) / static_cast<double>(T - k);
    loss += e * e;
  }
  return loss;
}

double upper_bound_or_zero(const CountyData& data, double alpha) {
  try {
    return compute_upper_bound(data.case_inputs(), alpha, data.cumulative_deaths.front(), 0.0);
  } catch (const InfeasibleError&) {
    return 0.0;
  }
}

LossEvaluation loss_with_bound(double i1, double r1, const CountyData& data, double alpha, const ModelParams& params,
                               double upper) {
  const double violation = std::max(0.0, -i1) + std::max(0.0, -r1) + std::max(0.0, i1 + r1 - upper);
  if (violation > 0.0 || !(upper > 0.0) || !std::isfinite(i1) || !std::isfinite(r1)) {
    const double v = std::isfinite(violation) ? violation / std::max(1.0, upper) : 1.0;
    return {kInfeasiblePenalty * (1.0 + v), false};
  }
  try {
    const Reconstruction rec = reconstruct(i1, r1, data, alpha, params);
    return {weighted_death_loss(data, rec.trajectory), true};
  } catch (const Error&) {
    return {kInfeasiblePenalty, false};
  }
}

double to_log(double x) { return std::log1p(x); }
double from_log(double u) { return std::expm1(u); }

}  // namespace

LossEvaluation county_loss(double i1, double r1, const CountyData& data, double alpha, const ModelParams& params) {
  if (data.size() == 0) throw DataError("empty county window");
  return loss_with_bound(i1, r1, data, alpha, params, upper_bound_or_zero(data, alpha));
}

FitResult fit_county_initials(const CountyData& data, double alpha, const ModelParams& params,
                              const FitOptions& options) {
  if (data.size() == 0) throw DataError("empty county window");
  const double upper = compute_upper_bound(data.case_inputs(), alpha, data.cumulative_deaths.front(), 0.0);

  auto objective = [&](const std::vector<double>& u) {
    return loss_with_bound(from_log(u[0]), from_log(u[1]), data, alpha, params, upper).value;
  };

  double i0 = options.start_i1, r0 = options.start_r1;
  if (i0 + r0 >= upper) {
    const double scale = 0.9 * upper / (i0 + r0);
    i0 *= scale;
    r0 *= scale;
  }
  std::vector<double> start{to_log(i0), to_log(r0)};
  std::string diagnostic;
  if (!loss_with_bound(i0, r0, data, alpha, params, upper).feasible) {
    start = {to_log(upper / 4.0), to_log(upper / 4.0)};
    diagnostic = "start infeasible; restarted from (U/4, U/4)";
    if (!loss_with_bound(upper / 4.0, upper / 4.0, data, alpha, params, upper).feasible)
      throw NumericalError("fit failure for region " + data.region_id + ": no feasible starting point");
  }

  const NelderMeadResult nm = nelder_mead(objective, start, options.optimizer);
  const double i1 = from_log(nm.x[0]);
  const double r1 = from_log(nm.x[1]);
  const LossEvaluation at_best = loss_with_bound(i1, r1, data, alpha, params, upper);
  if (!at_best.feasible) throw NumericalError("fit failure for region " + data.region_id + ": optimum infeasible");

  FitResult out;
  out.region_id = data.region_id;
  out.alpha = alpha;
  out.i1 = i1;
  out.r1 = r1;
  out.upper_bound = upper;
  out.day_one = data.day_one;
  out.loss_value = at_best.value;
  out.converged = nm.converged;
  out.iterations = nm.iterations;
  out.evaluations = nm.evaluations;
  Reconstruction rec = reconstruct(i1, r1, data, alpha, params);
  out.omega = rec.omega;
  out.trajectory = std::move(rec.trajectory);
  out.capped_days = std::move(rec.capped_days);
  if (!nm.converged) diagnostic += diagnostic.empty() ? "evaluation budget exhausted" : "; evaluation budget exhausted";
  out.diagnostic = diagnostic;
  return out;
}

StateAlphaFit fit_state_alpha(const CountyData& state, const ModelParams& params, const FitOptions& options) {
  StateAlphaFit out;
  double best = std::numeric_limits<double>::infinity();
  double best_i1 = options.start_i1, best_r1 = options.start_r1;
  for (int k = 0; k <= 8; ++k) {
    const double alpha = 0.25 * k;
    double loss = std::numeric_limits<double>::infinity();
    try {
      const FitResult fit = fit_county_initials(state, alpha, params, options);
      loss = fit.loss_value;
      if (loss < best) {
        best = loss;
        out.alpha = alpha;
        best_i1 = fit.i1;
        best_r1 = fit.r1;
      }
    } catch (const Error&) {
    }
    out.grid_alphas.push_back(alpha);
    out.grid_losses.push_back(loss);
  }
  if (!std::isfinite(best)) throw NumericalError("fit failure: no alpha admits a feasible state-level fit");
  out.i1 = best_i1;
  out.r1 = best_r1;
  out.loss_value = best;

  auto objective = [&](const std::vector<double>& x) {
    if (x[0] < kAlphaMin || x[0] > kAlphaMax) return kInfeasiblePenalty * (1.0 + std::abs(x[0] - std::clamp(x[0], kAlphaMin, kAlphaMax)));
    return county_loss(from_log(x[1]), from_log(x[2]), state, x[0], params).value;
  };
  NelderMeadOptions nm_opt = options.optimizer;
  nm_opt.initial_step = 0.25;
  const NelderMeadResult nm = nelder_mead(objective, {out.alpha, to_log(best_i1), to_log(best_r1)}, nm_opt);
  out.converged = nm.converged;
  if (nm.value < best) {
    out.alpha = std::clamp(nm.x[0], kAlphaMin, kAlphaMax);
    out.i1 = from_log(nm.x[1]);
    out.r1 = from_log(nm.x[2]);
    out.loss_value = county_loss(out.i1, out.r1, state, out.alpha, params).value;
  }
  return out;
}

}  // namespace sirdc
