#include <cmath>
#include <random>

#include "doctest.h"
#include "sirdc/error.hpp"
#include "sirdc/evaluation.hpp"

using namespace sirdc;

TEST_CASE("perfect forecast") {
  const std::vector<ScoredSeries> s{{"a", {1, 2, 3}, {0, 1, 2}, {2, 4, 6}, {1, 2, 3}}};
  const auto sc = forecast_scores(s);
  CHECK(sc.rmse == 0.0);
  CHECK(sc.coverage95 == 1.0);
  CHECK(sc.mean_interval_length == doctest::Approx(3.0));
  CHECK(sc.n_points == 3);
}

TEST_CASE("single missed point") {
  const std::vector<ScoredSeries> s{{"a", {10}, {0}, {10}, {12}}};
  const auto sc = forecast_scores(s);
  CHECK(sc.rmse == 2.0);
  CHECK(sc.coverage95 == 0.0);
  CHECK(sc.mean_interval_length == 10.0);
}

TEST_CASE("two counties pooled") {
  const std::vector<ScoredSeries> s{{"a", {3}, {}, {}, {0}}, {"b", {0}, {}, {}, {4}}};
  const auto sc = forecast_scores(s);
  CHECK(sc.rmse == std::sqrt(25.0 / 2.0));
  CHECK(std::isnan(sc.coverage95));
  const std::vector<ScoredSeries> swapped{s[1], s[0]};
  CHECK(forecast_scores(swapped).rmse == sc.rmse);
}

TEST_CASE("misaligned inputs are rejected") {
  const std::vector<ScoredSeries> s{{"a", {1, 2}, {}, {}, {1}}};
  CHECK_THROWS_AS(forecast_scores(s), DataError);
}

TEST_CASE("correlation hand cases") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  const std::vector<CorrelationInput> same{{"a", {1, 2, 3}, {1, 2, 3}, 10}};
  const auto one = correlation_scores(same);
  CHECK(one.rho_pooled == doctest::Approx(1.0));
  CHECK(one.rho_county_weighted == doctest::Approx(1.0));

  const std::vector<CorrelationInput> two{{"a", {1, 2, 3}, {2, 4, 6}, 3e6}, {"b", {1, 2, 3}, {1, 3, 2}, 1e6}};
  const auto sc = correlation_scores(two);
  CHECK(sc.county_rho[1] == doctest::Approx(0.5));
  CHECK(sc.rho_county_weighted == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(sc.weights[0] == doctest::Approx(0.75));

  const std::vector<CorrelationInput> single{{"b", {1, 2, 3}, {1, 3, 2}, 5}};
  CHECK(correlation_scores(single).rho_county_weighted == doctest::Approx(0.5));
}

TEST_CASE("flat counties are excluded; all flat is an error") {
  const std::vector<CorrelationInput> mixed{{"a", {1, 2, 3}, {5, 5, 5}, 1e6}, {"b", {1, 2, 3}, {1, 3, 2}, 1e6}};
  const auto sc = correlation_scores(mixed);
  CHECK(sc.excluded == 1);
  CHECK(sc.rho_county_weighted == doctest::Approx(0.5));
  const std::vector<CorrelationInput> flat{{"a", {1, 2, 3}, {5, 5, 5}, 1e6}};
  CHECK_THROWS_AS(correlation_scores(flat), DataError);
}

TEST_CASE("weighted correlation lies between county extremes") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> nc(1, 6), len(3, 12);
  std::uniform_real_distribution<double> pop(1e3, 1e7);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<CorrelationInput> in;
    const int counties = nc(rng);
    for (int c = 0; c < counties; ++c) {
      CorrelationInput ci{std::to_string(c), {}, {}, pop(rng)};
      const int n = len(rng);
      for (int k = 0; k < n; ++k) {
        ci.prediction.push_back(g(rng));
        ci.truth.push_back(ci.prediction.back() * g(rng) + g(rng));
      }
      in.push_back(std::move(ci));
    }
    const auto sc = correlation_scores(in);
    double lo = 1, hi = -1;
    for (double r : sc.county_rho)
      if (!std::isnan(r)) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    CHECK(sc.rho_county_weighted >= lo - 1e-12);
    CHECK(sc.rho_county_weighted <= hi + 1e-12);
    CHECK(std::abs(sc.rho_pooled) <= 1.0 + 1e-12);
  }
}
