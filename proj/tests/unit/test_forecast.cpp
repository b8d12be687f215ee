#include <cmath>

#include "doctest.h"
#include "sirdc/calibration.hpp"
#include "sirdc/forecast.hpp"
#include "sirdc/synthetic.hpp"
#include "sirdc/transmission.hpp"

using namespace sirdc;

namespace {

struct Fixture {
  SyntheticCounty county;
  CountyData data;
  FitResult fit;
};

// Noise-free county with a constant transmission rate, fitted at the true alpha.
const Fixture& constant_beta() {
  static const Fixture f = [] {
    Fixture x;
    SyntheticCountySpec spec;
    spec.population = 1e6;
    spec.d1 = 1;
    spec.betas.assign(80 + 21 - 1, 0.22);
    spec.positivity = synthetic_positivity(101, 3);
    x.county = make_synthetic_county(spec);
    const Date end = x.county.series.dates[79];
    x.data = county_window(x.county.series, x.county.series.dates.front(), &end);
    x.fit = fit_county_initials(x.data, 1.0, ModelParams{});
    return x;
  }();
  return f;
}

}  // namespace

TEST_CASE("isotonic regression and quantiles") {
  const std::vector<double> v{1, 3, 2, 4, 3.5, 5};
  const auto iso = isotonic_increasing(v);
  const std::vector<double> expected{1, 2.5, 2.5, 3.75, 3.75, 5};
  for (std::size_t k = 0; k < v.size(); ++k) CHECK(iso[k] == doctest::Approx(expected[k]));
  CHECK(isotonic_increasing(iso) == iso);
  CHECK(empirical_quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(empirical_quantile({1, 2, 3, 4, 5}, 0.025) == doctest::Approx(1.1));
  CHECK(empirical_quantile({7}, 0.975) == 7);
}

TEST_CASE("sample seeds are distinct and stable") {
  CHECK(sample_seed(1, 0) != sample_seed(1, 1));
  CHECK(sample_seed(1, 0) != sample_seed(2, 0));
  CHECK(sample_seed(42, 7) == sample_seed(42, 7));
}

TEST_CASE("confirmed paths: degenerate series, monotonicity, seeds") {
  CountyData flat;
  flat.region_id = "1";
  flat.population = 1e5;
  flat.cumulative_confirmed.assign(30, 50.0);
  flat.cumulative_deaths.assign(30, 1.0);
  flat.positivity.assign(30, 0.1);
  const auto paths = sample_confirmed_paths(flat, 20, 1);
  for (const auto& p : paths.paths)
    for (double v : p) CHECK(std::abs(v - 50.0) <= 1e-6);

  const CountyData& data = constant_beta().data;
  const auto a = sample_confirmed_paths(data, 50, 5), b = sample_confirmed_paths(data, 50, 5),
             c = sample_confirmed_paths(data, 50, 6);
  CHECK(a.paths == b.paths);
  CHECK(a.paths != c.paths);
  for (const auto& p : a.paths) {
    REQUIRE(p.size() == data.size());
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] >= p[k - 1]);
  }
}

TEST_CASE("transmission extrapolation: constant rate, clamping, seeds") {
  std::vector<double> beta;
  for (int k = 0; k < 60; ++k) beta.push_back(0.3 * (1 + 1e-6 * std::sin(k)));
  const auto paths = extrapolate_transmission(beta, 21, 500, 3);
  for (int j = 0; j < 21; ++j) {
    double m = 0.0;
    for (const auto& p : paths) m += p[static_cast<std::size_t>(j)] / paths.size();
    CHECK(std::abs(m / 0.3 - 1) < 0.01);
  }
  CHECK(paths == extrapolate_transmission(beta, 21, 500, 3));

  std::vector<double> wild;
  for (int k = 0; k < 40; ++k) wild.push_back(k % 2 ? 9.9 : 1e-3);
  for (const auto& p : extrapolate_transmission(wild, 30, 200, 4))
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= kBetaMax);
    }
}

TEST_CASE("constant-rate county forecast matches the deterministic extension") {
  const Fixture& fx = constant_beta();
  ForecastOptions opt;
  opt.seed = 11;
  const ForecastResult f = ensemble_forecast(fx.fit, fx.data, ModelParams{}, opt);
  REQUIRE(f.mean_deaths.size() == 21);
  CHECK(f.dropped == 0);
  CHECK_FALSE(f.degraded);
  const double truth = fx.county.truth.states[100].d;
  CHECK(std::abs(f.mean_deaths.back() / truth - 1) < 0.02);
  for (std::size_t j = 0; j < 21; ++j) {
    CHECK(f.lower95[j] <= f.mean_deaths[j]);
    CHECK(f.mean_deaths[j] <= f.upper95[j]);
    if (j > 0) CHECK(f.mean_deaths[j] >= f.mean_deaths[j - 1]);
    if (j > 0) CHECK(f.residual_scale2[j] >= f.residual_scale2[j - 1] - 1e-12);
  }
  CHECK(f.dates.front() == fx.data.day_one + std::chrono::days{80});
}

TEST_CASE("forecast is seed-deterministic and independent of the worker count") {
  const Fixture& fx = constant_beta();
  ForecastOptions opt;
  opt.seed = 5;
  opt.n_samples = 120;
  const auto a = ensemble_forecast(fx.fit, fx.data, ModelParams{}, opt);
  opt.jobs = 4;
  const auto b = ensemble_forecast(fx.fit, fx.data, ModelParams{}, opt);
  CHECK(a.mean_deaths == b.mean_deaths);
  CHECK(a.lower95 == b.lower95);
  CHECK(a.upper95 == b.upper95);
  opt.seed = 6;
  CHECK(ensemble_forecast(fx.fit, fx.data, ModelParams{}, opt).upper95 != a.upper95);
}

TEST_CASE("dropping the residual term reduces to the SIRDC projection") {
  const Fixture& fx = constant_beta();
  ForecastOptions opt;
  opt.seed = 2;
  opt.residual_gp = false;
  opt.sample_confirmed = false;
  const auto f = ensemble_forecast(fx.fit, fx.data, ModelParams{}, opt);
  for (std::size_t j = 0; j < 21; ++j) CHECK(std::abs(f.mean_deaths[j] / f.point_deaths[j] - 1) < 0.01);
}

TEST_CASE("constant-mean GP baseline has ordered bands") {
  const auto b = gp_constant_mean_forecast(constant_beta().data, 7);
  REQUIRE(b.mean.size() == 7);
  for (std::size_t j = 0; j < 7; ++j) CHECK(b.lower95[j] <= b.upper95[j]);
}

TEST_CASE("count noise widens the band without moving the mean") {
  const Fixture& fx = constant_beta();
  ForecastOptions quiet;
  quiet.seed = 4;
  quiet.residual_gp = false;
  quiet.sample_confirmed = false;
  quiet.count_noise = false;
  ForecastOptions noisy = quiet;
  noisy.count_noise = true;
  const auto a = ensemble_forecast(fx.fit, fx.data, ModelParams{}, quiet);
  const auto b = ensemble_forecast(fx.fit, fx.data, ModelParams{}, noisy);
  const double base = fx.data.cumulative_deaths.back();
  for (std::size_t j = 0; j < 21; ++j) {
    // Poisson sum over j+1 days: sd of the mean is sqrt(increment / n).
    const double added = a.mean_deaths[j] - base;
    CHECK(std::abs(b.mean_deaths[j] - a.mean_deaths[j]) <= 4 * std::sqrt(std::max(added, 1.0) / 500) + 1e-9);
    CHECK(b.upper95[j] - b.lower95[j] >= a.upper95[j] - a.lower95[j]);
  }
}

TEST_CASE("beta window longer than the series uses every rate") {
  const Fixture& fx = constant_beta();
  ForecastOptions all, huge;
  all.n_samples = huge.n_samples = 40;
  all.beta_window = 0;
  huge.beta_window = 10000;
  const auto a = ensemble_forecast(fx.fit, fx.data, ModelParams{}, all);
  const auto b = ensemble_forecast(fx.fit, fx.data, ModelParams{}, huge);
  CHECK(a.mean_deaths == b.mean_deaths);
  CHECK(a.upper95 == b.upper95);
}
