#pragma once

#include <span>
#include <string>
#include <vector>

namespace sirdc {

/// Predictions, 95% bounds and truths for one region over its scoring window.
struct ScoredSeries {
  std::string region_id;
  std::vector<double> prediction;
  std::vector<double> lower95;  ///< may be empty for point forecasts
  std::vector<double> upper95;
  std::vector<double> truth;
};

struct ForecastScores {
  double rmse = 0.0;
  double coverage95 = 0.0;             ///< NaN when no intervals were supplied
  double mean_interval_length = 0.0;   ///< NaN when no intervals were supplied
  std::size_t n_points = 0;
};

/// RMSE, interval coverage and mean interval length pooled over every
/// (region, day) pair. Throws DataError on misaligned inputs.
ForecastScores forecast_scores(std::span<const ScoredSeries> series);

struct CorrelationInput {
  std::string region_id;
  std::vector<double> prediction;
  std::vector<double> truth;
  double population = 0.0;
};

struct CorrelationScores {
  double rho_pooled = 0.0;
  double rho_county_weighted = 0.0;
  std::vector<double> weights;          ///< normalized, aligned with the input; 0 for excluded regions
  std::vector<double> county_rho;       ///< NaN for excluded regions
  std::size_t excluded = 0;             ///< zero-variance or too-short regions
};

/// Pearson correlation of two equal-length samples; NaN if either has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pooled Pearson correlation over all pairs and the population-weighted
/// mean of per-region correlations. Throws DataError when every region is degenerate.
CorrelationScores correlation_scores(std::span<const CorrelationInput> regions);

}  // namespace sirdc
