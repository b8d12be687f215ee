#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sirdc/calibration.hpp"
#include "sirdc/date.hpp"
#include "sirdc/model.hpp"

namespace sirdc {

struct ForecastOptions {
  int horizon = 21;
  int n_samples = 500;
  std::uint64_t seed = 0;
  bool residual_gp = true;       ///< add the death-residual GP draw (off = SIRDC-only ensemble)
  bool sample_confirmed = true;  ///< perturb the confirmed series (off = central reconstruction)
  bool count_noise = true;       ///< Poisson counts on the daily death increments of each sample
  int beta_window = 42;          ///< trailing rates used to extrapolate beta (0 = all)
  bool retain_samples = false;
  int jobs = 1;
};

struct ForecastResult {
  std::string region_id;
  int horizon_days = 0;
  std::vector<Date> dates;
  std::vector<double> mean_deaths;
  std::vector<double> lower95;
  std::vector<double> upper95;
  std::vector<double> point_deaths;     ///< deterministic SIRDC projection with the GP-mean beta path
  std::vector<double> residual_scale2;  ///< residual GP predictive scale per horizon day
  int n_samples = 0;
  std::uint64_t seed = 0;
  int dropped = 0;
  bool degraded = false;  ///< more than 10% of samples dropped
  bool confirmed_degenerate = false;
  std::vector<std::vector<double>> death_samples;  ///< kept samples, if retained
  std::vector<std::vector<double>> beta_samples;
};

/// Per-sample RNG seed; parallel and serial runs draw identical streams.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

struct ConfirmedPaths {
  std::vector<std::vector<double>> paths;  ///< each non-decreasing, length T
  bool degenerate = false;                 ///< GP unavailable; observed path replicated
};

/// Draws cumulative-confirmed paths over the training window from a
/// constant-mean GP fitted to the observed series.
ConfirmedPaths sample_confirmed_paths(const CountyData& data, int n_samples, std::uint64_t seed);

/// Beta paths over `horizon` future days from a GP on log(beta); values are
/// clamped to [0, kBetaMax]. Rows are samples.
std::vector<std::vector<double>> extrapolate_transmission(std::span<const double> betas, int horizon, int n_samples,
                                                          std::uint64_t seed);

/// Ensemble forecast of cumulative deaths for the `horizon` days after the
/// training window. Throws NumericalError when more than half the samples fail.
ForecastResult ensemble_forecast(const FitResult& fit, const CountyData& data, const ModelParams& params,
                                 const ForecastOptions& options = {});

/// Constant-mean GP on the observed death toll alone (baseline).
struct BaselineForecast {
  std::vector<double> mean;
  std::vector<double> lower95;
  std::vector<double> upper95;
};
BaselineForecast gp_constant_mean_forecast(const CountyData& data, int horizon);

/// Pool-adjacent-violators fit: closest non-decreasing sequence in L2.
std::vector<double> isotonic_increasing(std::span<const double> values);

/// Type-7 (linear interpolation) sample quantile of unsorted data.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace sirdc
