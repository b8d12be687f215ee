#include <cmath>

#include "doctest.h"
#include "sirdc/epi_metrics.hpp"
#include "sirdc/error.hpp"
#include "sirdc/synthetic.hpp"

using namespace sirdc;

TEST_CASE("reproduction numbers") {
  const ModelParams p{0.2, 0.1, 0.0066, 1000};
  auto r = reproduction_numbers(0.2, 1000, p);
  CHECK(r.r0 == doctest::Approx(1.0));
  CHECK(r.reff == doctest::Approx(1.0));
  r = reproduction_numbers(0.4, 500, p);
  CHECK(r.r0 == doctest::Approx(2.0));
  CHECK(r.reff == doctest::Approx(1.0));
  CHECK(reproduction_numbers(3.0, 0, p).reff == 0.0);
}

TEST_CASE("contraction probability") {
  CHECK(contraction_probability(0.4, 0, 1e6) == 0.0);
  CHECK(contraction_probability(0.4, 1e4, 1e6) == doctest::Approx(0.004));
  const ModelParams p{0.2, 0.1, 0.0066, 1e6};
  const double beta = 0.37, i = 2500, s = 6e5;
  const double reff = reproduction_numbers(beta, s, p).reff;
  CHECK(std::abs(contraction_probability(beta, i, 1e6) - reff * i * p.gamma / s) <= 1e-12);
}

TEST_CASE("risk table examples and boundaries") {
  CHECK(classify_risk(0.00005) == RiskLevel::kModerate);
  CHECK(classify_risk(0.005) == RiskLevel::kStronglyAlarming);
  CHECK(classify_risk(0.02) == RiskLevel::kHazardous);
  CHECK(classify_risk(0.0) == RiskLevel::kControllable);
  CHECK(classify_risk(1e-5) == RiskLevel::kModerate);
  CHECK(classify_risk(1e-4) == RiskLevel::kAlarming);
  CHECK(classify_risk(1e-3) == RiskLevel::kStronglyAlarming);
  CHECK(classify_risk(1e-2) == RiskLevel::kHazardous);
  CHECK(classify_risk(std::nextafter(1e-5, 0.0)) == RiskLevel::kControllable);
  CHECK(classify_risk(std::nextafter(1e-4, 0.0)) == RiskLevel::kModerate);
  CHECK(classify_risk(std::nextafter(1e-3, 0.0)) == RiskLevel::kAlarming);
  CHECK(classify_risk(std::nextafter(1e-2, 0.0)) == RiskLevel::kStronglyAlarming);
  CHECK(classify_risk(1.0) == RiskLevel::kHazardous);
  CHECK(to_string(RiskLevel::kStronglyAlarming) == "strongly-alarming");
}

TEST_CASE("classify_risk is monotone") {
  int prev = 0;
  for (double e = -9; e <= 0; e += 0.01) {
    const int level = static_cast<int>(classify_risk(std::pow(10.0, e)));
    CHECK(level >= prev);
    prev = level;
  }
}

namespace {

FitResult growing_county_fit() {
  SyntheticCountySpec spec;
  spec.population = 1e6;
  spec.betas.assign(99, 0.3);
  spec.positivity = synthetic_positivity(100, 1);
  const auto c = make_synthetic_county(spec);
  FitResult fit;
  fit.trajectory = c.truth;
  fit.i1 = spec.i1;
  fit.r1 = spec.r1;
  return fit;
}

}  // namespace

TEST_CASE("counterfactuals: identity, Reff rescaling, fewer deaths") {
  const FitResult fit = growing_county_fit();
  const ModelParams p = ModelParams{}.with_population(1e6);
  const auto same = scenario_counterfactual(fit, 5.0, p);
  for (std::size_t k = 0; k < fit.trajectory.size(); ++k) {
    CHECK(same.trajectory.states[k].s == fit.trajectory.states[k].s);
    CHECK(same.trajectory.states[k].d == fit.trajectory.states[k].d);
  }
  CHECK(same.risk.reff.front() > 1.0);

  const auto c475 = scenario_counterfactual(fit, 4.75, p);
  const auto c45 = scenario_counterfactual(fit, 4.5, p);
  CHECK(c475.gamma == 1.0 / 4.75);
  for (std::size_t k = 0; k < same.risk.r0.size(); ++k)
    CHECK(c475.risk.r0[k] / same.risk.r0[k] == doctest::Approx(4.75 / 5.0).epsilon(1e-14));
  CHECK(c475.risk.reff.front() / same.risk.reff.front() == doctest::Approx(4.75 / 5.0).epsilon(1e-14));
  CHECK(c475.trajectory.states.back().d < same.trajectory.states.back().d);
  CHECK(c45.trajectory.states.back().d < c475.trajectory.states.back().d);
  CHECK_THROWS_AS(scenario_counterfactual(fit, 0.0, p), DataError);
}

TEST_CASE("risk series identity along a trajectory") {
  const FitResult fit = growing_county_fit();
  const ModelParams p = ModelParams{}.with_population(1e6);
  const RiskSeries r = risk_series(fit.trajectory, p);
  REQUIRE(r.poc.size() == fit.trajectory.betas.size());
  for (std::size_t k = 0; k < r.poc.size(); ++k) {
    const double s = fit.trajectory.states[k].s, i = fit.trajectory.states[k].i;
    CHECK(std::abs(r.poc[k] - r.reff[k] * i * p.gamma / s) <= 1e-12);
    CHECK(r.level[k] == classify_risk(r.poc[k]));
  }
}
