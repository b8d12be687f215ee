#pragma once

#include <string>
#include <vector>

#include "sirdc/date.hpp"
#include "sirdc/ingestion.hpp"
#include "sirdc/model.hpp"
#include "sirdc/nelder_mead.hpp"
#include "sirdc/susceptible.hpp"

namespace sirdc {

inline constexpr double kCaseThreshold = 5.0;
inline constexpr double kAlphaMin = 0.0;
inline constexpr double kAlphaMax = 2.0;

/// One region's training window starting at day one.
struct CountyData {
  std::string region_id;
  Date day_one{};
  std::vector<double> cumulative_confirmed;
  std::vector<double> cumulative_deaths;
  std::vector<double> positivity;
  double population = 0.0;

  std::size_t size() const { return cumulative_confirmed.size(); }
  CaseInputs case_inputs() const;
};

/// The later of `floor` and the first date with at least five cumulative
/// confirmed cases. Throws NotFittableError when the threshold is never reached.
Date select_day_one(const RegionSeries& region, Date floor = default_day_one_floor());

/// Slices [day_one, last] (last defaults to the final date) into a CountyData.
CountyData county_window(const RegionSeries& region, Date day_one, const Date* last = nullptr);

/// Reconstructed compartments for given day-one infectious/resolving counts.
/// Throws InfeasibleError / DataError / NumericalError from the pipeline.
struct Reconstruction {
  Trajectory trajectory;
  double omega = 0.0;
  std::vector<int> capped_days;
};
Reconstruction reconstruct(double i1, double r1, const CountyData& data, double alpha, const ModelParams& params);

struct LossEvaluation {
  double value = 0.0;
  bool feasible = true;
};

/// Penalty returned for infeasible points; finite so simplex methods keep working.
inline constexpr double kInfeasiblePenalty = 1e30;

/// sum_t [(D(t) - Dhat(t)) / (T - t + 1)]^2 with Dhat from the reconstructed
/// compartments. Infeasible (i1, r1) give kInfeasiblePenalty * (1 + violation).
LossEvaluation county_loss(double i1, double r1, const CountyData& data, double alpha, const ModelParams& params);

struct FitResult {
  std::string region_id;
  double alpha = 1.0;
  double omega = 0.0;
  double i1 = 0.0;
  double r1 = 0.0;
  double upper_bound = 0.0;
  Date day_one{};
  double loss_value = 0.0;
  Trajectory trajectory;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::vector<int> capped_days;
  std::string diagnostic;
};

struct FitOptions {
  double start_i1 = 1000.0;
  double start_r1 = 1000.0;
  NelderMeadOptions optimizer{};
};

/// Fits (I(1), R(1)) for fixed alpha by Nelder-Mead in log(1 + x) space.
/// Throws NumericalError (fit failure) when no feasible point is found.
FitResult fit_county_initials(const CountyData& data, double alpha, const ModelParams& params,
                              const FitOptions& options = {});

struct StateAlphaFit {
  double alpha = 1.0;
  double i1 = 0.0;
  double r1 = 0.0;
  double loss_value = 0.0;
  std::vector<double> grid_alphas;  ///< coarse profile grid scanned first
  std::vector<double> grid_losses;  ///< profile loss at each grid alpha
  bool converged = false;
};

/// Jointly fits (alpha, I(1), R(1)) on state-level data: a coarse alpha
/// profile scan followed by a three-parameter simplex polish. Only alpha is
/// meant to be kept.
StateAlphaFit fit_state_alpha(const CountyData& state, const ModelParams& params, const FitOptions& options = {});

}  // namespace sirdc
