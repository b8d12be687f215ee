#include "sirdc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sirdc/error.hpp"

namespace sirdc {

ForecastScores forecast_scores(std::span<const ScoredSeries> series) {
  double sq = 0.0, length = 0.0;
  std::size_t n = 0, covered = 0, with_interval = 0;
  for (const auto& s : series) {
    if (s.prediction.size() != s.truth.size())
      throw DataError("prediction and truth grids are misaligned for region " + s.region_id);
    const bool has_interval = !s.lower95.empty() || !s.upper95.empty();
    if (has_interval && (s.lower95.size() != s.truth.size() || s.upper95.size() != s.truth.size()))
      throw DataError("interval grid is misaligned for region " + s.region_id);
    for (std::size_t k = 0; k < s.truth.size(); ++k) {
      const double e = s.prediction[k] - s.truth[k];
      sq += e * e;
      ++n;
      if (has_interval) {
        ++with_interval;
        if (s.truth[k] >= s.lower95[k] && s.truth[k] <= s.upper95[k]) ++covered;
        length += s.upper95[k] - s.lower95[k];
      }
    }
  }
  if (n == 0) throw DataError("nothing to score");
  ForecastScores out;
  out.n_points = n;
  out.rmse = std::sqrt(sq / static_cast<double>(n));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.coverage95 = with_interval ? static_cast<double>(covered) / static_cast<double>(with_interval) : nan;
  out.mean_interval_length = with_interval ? length / static_cast<double>(with_interval) : nan;
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() < 2) return nan;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return nan;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationScores correlation_scores(std::span<const CorrelationInput> regions) {
  CorrelationScores out;
  std::vector<double> all_pred, all_truth;
  double weight_sum = 0.0;
  for (const auto& r : regions) {
    if (r.prediction.size() != r.truth.size())
      throw DataError("prediction and truth grids are misaligned for region " + r.region_id);
    all_pred.insert(all_pred.end(), r.prediction.begin(), r.prediction.end());
    all_truth.insert(all_truth.end(), r.truth.begin(), r.truth.end());
    const double rho = pearson(r.prediction, r.truth);
    out.county_rho.push_back(rho);
    if (std::isnan(rho)) {
      ++out.excluded;
      out.weights.push_back(0.0);
    } else {
      out.weights.push_back(r.population);
      weight_sum += r.population;
    }
  }
  if (out.excluded == regions.size() || !(weight_sum > 0.0))
    throw DataError("correlation undefined: every region is degenerate");
  double acc = 0.0;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    out.weights[k] /= weight_sum;
    if (out.weights[k] > 0.0) acc += out.weights[k] * out.county_rho[k];
  }
  out.rho_county_weighted = std::clamp(acc, -1.0, 1.0);
  out.rho_pooled = pearson(all_pred, all_truth);
  return out;
}

}  // namespace sirdc
