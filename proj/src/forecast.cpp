#include "sirdc/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "sirdc/error.hpp"
#include "sirdc/gp.hpp"
#include "sirdc/parallel.hpp"
#include "sirdc/transmission.hpp"

namespace sirdc {
namespace {

constexpr double kLogBetaFloor = 1e-4;

Eigen::VectorXd to_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[k];
  return out;
}

std::vector<double> day_grid(double first, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = first + static_cast<double>(k);
  return t;
}

std::vector<double> log_betas(std::span<const double> betas) {
  std::vector<double> out(betas.size());
  for (std::size_t k = 0; k < betas.size(); ++k) out[k] = std::log(std::max(betas[k], kLogBetaFloor));
  return out;
}

void running_max(std::vector<double>& path) {
  double m = 0.0;
  for (double& v : path) {
    m = std::max(m, v);
    v = m;
  }
}

// Extrapolates log(beta) with hyperparameters fitted once on a reference
// series; each sample re-estimates its own constant mean and variance. Only
// the trailing `window` rates enter (0 keeps them all).
class BetaExtrapolator {
 public:
  BetaExtrapolator(std::span<const double> reference_betas, int horizon, int window) {
    const std::size_t n = reference_betas.size();
    if (n < 3) throw DataError("beta extrapolation needs at least three rates");
    used_ = window > 0 ? std::min(n, std::max<std::size_t>(3, static_cast<std::size_t>(window))) : n;
    times_ = day_grid(1.5 + static_cast<double>(n - used_), used_);
    const std::vector<double> y = log_betas(tail(reference_betas));
    const GPModel model = fit_constant_mean(times_, y);
    factor_ = model.shared_factor();
    future_ = day_grid(static_cast<double>(n) + 1.5, static_cast<std::size_t>(horizon));
    // Latent draws: the nugget is estimation noise in recovered rates, not day-to-day transmission.
    predictor_.emplace(factor_, future_, HorizonPredictor::Options{.include_nugget = false, .estimated_mean = true});
    ones_solved_ = factor_->solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(used_)));
  }

  HorizonPredictor::Moments moments(std::span<const double> betas) const {
    const Eigen::VectorXd y = to_vector(log_betas(tail(betas)));
    const double mean = ones_solved_.dot(y) / ones_solved_.sum();
    const Eigen::VectorXd resid = (y.array() - mean).matrix();
    return predictor_->moments(resid, std::vector<double>(future_.size(), mean));
  }

  std::vector<double> draw(const HorizonPredictor::Moments& m, std::mt19937_64& rng) const {
    const Eigen::VectorXd x = predictor_->draw(m, rng);
    std::vector<double> out(static_cast<std::size_t>(x.size()));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(std::exp(x[static_cast<Eigen::Index>(k)]), 0.0, kBetaMax);
    return out;
  }

  std::vector<double> mean_path(const HorizonPredictor::Moments& m) const {
    std::vector<double> out(static_cast<std::size_t>(m.location.size()));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(std::exp(m.location[static_cast<Eigen::Index>(k)]), 0.0, kBetaMax);
    return out;
  }

  std::size_t size() const { return times_.size(); }

 private:
  std::span<const double> tail(std::span<const double> betas) const {
    if (betas.size() < used_) throw DataError("beta series shorter than the extrapolation window");
    return betas.subspan(betas.size() - used_);
  }

  std::size_t used_ = 0;
  std::vector<double> times_;
  std::vector<double> future_;
  std::shared_ptr<const CorrelationFactor> factor_;
  std::optional<HorizonPredictor> predictor_;
  Eigen::VectorXd ones_solved_;
};

// Replaces each daily increment above `start` with a Poisson count of the same mean.
void poisson_increments(std::vector<double>& path, double start, std::mt19937_64& rng) {
  double previous = start, level = start;
  for (double& v : path) {
    const double increment = std::max(0.0, v - previous);
    previous = v;
    if (increment > 0.0) level += static_cast<double>(std::poisson_distribution<long long>(increment)(rng));
    v = level;
  }
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over a combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> isotonic_increasing(std::span<const double> values) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : values) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t n = count.back() + count[count.size() - 2];
      const double merged = (level.back() * count.back() + level[level.size() - 2] * count[count.size() - 2]) / n;
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = n;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t b = 0; b < level.size(); ++b) out.insert(out.end(), count[b], level[b]);
  return out;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

// Shared state for confirmed-path sampling.
struct ConfirmedSampler {
  std::optional<HorizonPredictor> predictor;
  HorizonPredictor::Moments moments;
  std::vector<double> observed;
  bool degenerate = true;

  explicit ConfirmedSampler(const CountyData& data) : observed(data.cumulative_confirmed) {
    if (observed.size() < 3) return;
    try {
      const std::vector<double> t = day_grid(1.0, observed.size());
      const GPModel model = fit_constant_mean(t, observed);
      if (model.degenerate()) return;
      predictor.emplace(model.shared_factor(), t);
      moments = predictor->moments(to_vector(model.residuals()), model.means());
      degenerate = false;
    } catch (const Error&) {
      degenerate = true;
    }
  }

  std::vector<double> draw(std::mt19937_64& rng) const {
    if (degenerate) return observed;
    const Eigen::VectorXd x = predictor->draw(moments, rng);
    std::vector<double> path(observed.size());
    for (std::size_t k = 0; k < path.size(); ++k) path[k] = std::max(0.0, x[static_cast<Eigen::Index>(k)]);
    running_max(path);
    return path;
  }
};

}  // namespace

ConfirmedPaths sample_confirmed_paths(const CountyData& data, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DataError("n_samples must be positive");
  const ConfirmedSampler sampler(data);
  ConfirmedPaths out;
  out.degenerate = sampler.degenerate;
  for (int s = 0; s < n_samples; ++s) {
    std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(s)));
    out.paths.push_back(sampler.draw(rng));
  }
  return out;
}

std::vector<std::vector<double>> extrapolate_transmission(std::span<const double> betas, int horizon, int n_samples,
                                                          std::uint64_t seed) {
  if (horizon < 1 || n_samples < 1) throw DataError("horizon and n_samples must be positive");
  const BetaExtrapolator ext(betas, horizon, 0);
  const auto m = ext.moments(betas);
  std::vector<std::vector<double>> out;
  for (int s = 0; s < n_samples; ++s) {
    std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(s)));
    out.push_back(ext.draw(m, rng));
  }
  return out;
}

ForecastResult ensemble_forecast(const FitResult& fit, const CountyData& data, const ModelParams& params,
                                 const ForecastOptions& options) {
  const std::size_t T = data.size();
  if (options.horizon < 1 || options.n_samples < 1) throw DataError("horizon and n_samples must be positive");
  if (fit.trajectory.size() != T) throw DataError("fit and county window differ in length");
  if (T < 4) throw DataError("forecasting needs at least four training days");
  const ModelParams p = params.with_population(data.population);
  const auto H = static_cast<std::size_t>(options.horizon);

  const BetaExtrapolator beta_gp(fit.trajectory.betas, options.horizon, options.beta_window);
  const ConfirmedSampler confirmed(data);

  // Death residual GP, fitted once on the calibrated trajectory.
  const std::vector<double> train_t = day_grid(1.0, T);
  const std::vector<double> future_t = day_grid(static_cast<double>(T) + 1.0, H);
  std::vector<double> resid(T);
  for (std::size_t k = 0; k < T; ++k) resid[k] = data.cumulative_deaths[k] - fit.trajectory.states[k].d;
  const GPModel resid_model = fit_hyperparameters(train_t, resid);
  const HorizonPredictor resid_pred(resid_model.shared_factor(), future_t);
  const auto resid_moments = resid_pred.moments(to_vector(resid), std::vector<double>(H, 0.0));

  ForecastResult out;
  out.region_id = data.region_id;
  out.horizon_days = options.horizon;
  out.n_samples = options.n_samples;
  out.seed = options.seed;
  out.confirmed_degenerate = confirmed.degenerate;
  for (std::size_t j = 0; j < H; ++j) {
    out.dates.push_back(data.day_one + std::chrono::days{static_cast<int>(T + j)});
    out.residual_scale2.push_back(resid_moments.sigma2 * resid_pred.scale_factors()[static_cast<Eigen::Index>(j)]);
  }

  {
    const auto central = beta_gp.moments(fit.trajectory.betas);
    const std::vector<double> beta_path = beta_gp.mean_path(central);
    const Trajectory proj = simulate_forward(fit.trajectory.states.back(), beta_path, p);
    for (std::size_t j = 0; j < H; ++j) out.point_deaths.push_back(proj.states[j + 1].d);
  }

  const int n = options.n_samples;
  std::vector<std::vector<double>> deaths(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> betas(static_cast<std::size_t>(n));
  std::vector<char> ok(static_cast<std::size_t>(n), 0);

  parallel_for(n, options.jobs, [&](int s) {
    std::mt19937_64 rng(sample_seed(options.seed, static_cast<std::uint64_t>(s)));
    try {
      const Trajectory* base = &fit.trajectory;
      Reconstruction rec;
      if (options.sample_confirmed && !confirmed.degenerate) {
        CountyData perturbed = data;
        perturbed.cumulative_confirmed = confirmed.draw(rng);
        rec = reconstruct(fit.i1, fit.r1, perturbed, fit.alpha, params);
        base = &rec.trajectory;
      }
      std::vector<double> beta_path = beta_gp.draw(beta_gp.moments(base->betas), rng);
      const Trajectory proj = simulate_forward(base->states.back(), beta_path, p);
      std::vector<double> path(H);
      for (std::size_t j = 0; j < H; ++j) path[j] = proj.states[j + 1].d;
      if (options.count_noise) poisson_increments(path, proj.states[0].d, rng);
      if (options.residual_gp) {
        const Eigen::VectorXd z = resid_pred.draw(resid_moments, rng);
        for (std::size_t j = 0; j < H; ++j) path[j] += z[static_cast<Eigen::Index>(j)];
      }
      deaths[static_cast<std::size_t>(s)] = std::move(path);
      betas[static_cast<std::size_t>(s)] = std::move(beta_path);
      ok[static_cast<std::size_t>(s)] = 1;
    } catch (const Error&) {
      ok[static_cast<std::size_t>(s)] = 0;
    }
  });

  std::vector<std::vector<double>> kept;
  for (std::size_t s = 0; s < deaths.size(); ++s) {
    if (ok[s]) {
      kept.push_back(std::move(deaths[s]));
      if (options.retain_samples) out.beta_samples.push_back(std::move(betas[s]));
    }
  }
  out.dropped = n - static_cast<int>(kept.size());
  if (out.dropped * 2 > n) throw NumericalError("forecast failed: more than half of the ensemble samples dropped");
  out.degraded = out.dropped * 10 > n;

  std::vector<double> raw_mean(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    std::vector<double> column(kept.size());
    for (std::size_t s = 0; s < kept.size(); ++s) {
      column[s] = kept[s][j];
      raw_mean[j] += kept[s][j];
    }
    raw_mean[j] /= static_cast<double>(kept.size());
    out.lower95.push_back(empirical_quantile(column, 0.025));
    out.upper95.push_back(empirical_quantile(column, 0.975));
  }
  out.mean_deaths = isotonic_increasing(raw_mean);
  for (std::size_t j = 0; j < H; ++j) {
    out.lower95[j] = std::min(out.lower95[j], out.mean_deaths[j]);
    out.upper95[j] = std::max(out.upper95[j], out.mean_deaths[j]);
  }
  if (options.retain_samples) out.death_samples = std::move(kept);
  return out;
}

BaselineForecast gp_constant_mean_forecast(const CountyData& data, int horizon) {
  const std::size_t T = data.size();
  if (T < 3) throw DataError("baseline forecast needs at least three days");
  const std::vector<double> t = day_grid(1.0, T);
  const GPModel model = fit_constant_mean(t, data.cumulative_deaths);
  const double mean = model.means().front();
  BaselineForecast out;
  for (int j = 0; j < horizon; ++j) {
    const PredictiveDistribution pd = predictive_distribution(model, static_cast<double>(T + 1 + j), mean);
    out.mean.push_back(pd.location);
    out.lower95.push_back(pd.lower95());
    out.upper95.push_back(pd.upper95());
  }
  return out;
}

}  // namespace sirdc
