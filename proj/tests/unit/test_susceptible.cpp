#include <cmath>

#include "doctest.h"
#include "sirdc/error.hpp"
#include "sirdc/susceptible.hpp"

using namespace sirdc;

namespace {

CaseInputs toy() {
  const std::vector<double> cum{5, 15, 35};
  const std::vector<double> pos{0.2, 0.1, 0.4};
  return CaseInputs::from_cumulative(cum, pos, 1e5);
}

}  // namespace

TEST_CASE("alpha = 0 and omega = 1 give N minus cumulative cases") {
  const std::vector<double> cum{5, 9, 30, 31};
  const std::vector<double> pos{0.3, 0.2, 0.5, 0.9};
  const auto s = build_susceptible_series(CaseInputs::from_cumulative(cum, pos, 1000), {0.0, 1.0});
  for (std::size_t k = 0; k < cum.size(); ++k) CHECK(s[k] == 1000 - cum[k]);
}

TEST_CASE("constant positivity cancels against omega") {
  const std::vector<double> cum{5, 9, 30};
  const std::vector<double> pos(3, 0.5);
  const auto s = build_susceptible_series(CaseInputs::from_cumulative(cum, pos, 1000), {1.0, 0.5});
  for (std::size_t k = 0; k < cum.size(); ++k) CHECK(s[k] == doctest::Approx(1000 - cum[k]).epsilon(1e-14));
}

TEST_CASE("hand arithmetic oracle") {
  const auto w = weighted_cumulative_cases(toy(), 1.0);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(10.0).epsilon(1e-15));
  const auto s = build_susceptible_series(toy(), {1.0, 0.1});
  CHECK(s[0] == doctest::Approx(1e5 - 10).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(1e5 - 20).epsilon(1e-14));
  CHECK(s[2] == doctest::Approx(1e5 - 100).epsilon(1e-14));
}

TEST_CASE("non-positive susceptibles name the first bad day") {
  try {
    build_susceptible_series(toy(), {1.0, 1e-4});
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.day() == 3);
  }
}

TEST_CASE("compute_omega examples") {
  CompartmentState a;
  a.i = 3;
  a.r = 1;
  a.d = 1;
  CHECK(compute_omega(0.4, 0.0, 5, a) == 1.0);
  CompartmentState b;
  b.i = 1;
  CHECK(compute_omega(0.25, 2.0, 16, b) == 1.0);
  CompartmentState c;
  c.i = 1000;
  c.r = 1000;
  c.d = 2;
  CHECK(compute_omega(0.1, 1.0, 50, c) == doctest::Approx(5.0 / 2002).epsilon(1e-15));
  CHECK_THROWS_AS(compute_omega(0.1, 1.0, 50, CompartmentState{}), InfeasibleError);
}

TEST_CASE("upper bound examples") {
  const std::vector<double> one{7};
  const std::vector<double> p1{0.3};
  CHECK(compute_upper_bound(CaseInputs::from_cumulative(one, p1, 500), 1.0, 4, 1) == 495);
  CHECK(compute_upper_bound(toy(), 1.0, 0, 0) == doctest::Approx(1e4).epsilon(1e-14));
}

TEST_CASE("upper bound separates feasible from infeasible initial values") {
  const CaseInputs in = toy();
  const double d1 = 3, u = compute_upper_bound(in, 1.0, d1, 0);
  auto min_s = [&](double ir) {
    CompartmentState first;
    first.i = ir;
    first.d = d1;
    const double omega = compute_omega(in.positivity[0], 1.0, in.cumulative_confirmed[0], first);
    const auto w = weighted_cumulative_cases(in, 1.0);
    return in.population - w.back() / omega;
  };
  CHECK(min_s(u - 1) > 0);
  CHECK(min_s(u + 1) <= 0);
}
