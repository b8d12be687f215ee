#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sirdc/calibration.hpp"
#include "sirdc/epi_metrics.hpp"
#include "sirdc/evaluation.hpp"
#include "sirdc/forecast.hpp"
#include "sirdc/model.hpp"

namespace sirdc {

inline constexpr int kSchemaVersion = 1;

/// day,S,I,R,D,C,beta with beta blank on the final day. `first_date`, when
/// given, adds a leading date column.
std::string trajectory_csv(const Trajectory& trajectory, const Date* first_date = nullptr);

/// A fit plus the rates it was computed with.
struct FitRecord {
  FitResult fit;
  ModelParams params;
  double state_alpha = 1.0;
};

std::string fit_to_json(const FitRecord& record);
/// Throws DataError on schema mismatch.
FitRecord fit_from_json(std::string_view text);

std::string forecast_csv(const ForecastResult& forecast);
std::string forecast_json(const ForecastResult& forecast, std::string_view method = "sirdc-gp");

/// Forecast columns read back from either rendering.
struct ForecastTable {
  std::string region_id;
  std::string method = "sirdc-gp";
  std::vector<Date> dates;
  std::vector<double> mean;
  std::vector<double> lower95;
  std::vector<double> upper95;
};
ForecastTable forecast_from_json(std::string_view text);
ForecastTable forecast_from_csv(std::string_view text, std::string region_id);

/// date,PoC,level,Reff,I for days 1 .. T-1.
std::string risk_csv(const RiskSeries& risk, Date first_date);

std::string scores_json(const ForecastScores& scores, std::string_view method);

struct ComparisonRow {
  std::string method;
  ForecastScores scores;
};
/// method,rmse,coverage95,interval_length
std::string comparison_csv(std::span<const ComparisonRow> rows);

}  // namespace sirdc
