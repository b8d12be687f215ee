#include <cmath>

#include "doctest.h"
#include "sirdc/error.hpp"
#include "sirdc/model.hpp"
#include "sirdc/synthetic.hpp"

using namespace sirdc;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CompartmentState fig2_state() {
  CompartmentState s;
  s.s = 1e7 - 2000;
  s.i = 1000;
  s.r = 1000;
  return s;
}

}  // namespace

TEST_CASE("forward_step with beta = 0 only decays I") {
  const ModelParams p{0.2, 0.1, 0.0066, 1e7};
  const auto next = forward_step(fig2_state(), 0.0, p);
  CHECK(next.s == fig2_state().s);
  CHECK(rel(next.i, 1000 * std::exp(-0.2)) < 1e-15);
  CHECK(next.day == 2);
}

TEST_CASE("forward_step without infectious or resolving is stationary") {
  const ModelParams p{0.2, 0.1, 0.0066, 1e5};
  CompartmentState s;
  s.s = 9e4;
  s.d = 10;
  s.c = 5;
  const auto next = forward_step(s, 0.7, p);
  CHECK(next.s == s.s);
  CHECK(next.i == 0.0);
  CHECK(next.r == 0.0);
  CHECK(next.d == s.d);
  CHECK(next.c == s.c);
}

TEST_CASE("forward_step matches a high-precision oracle") {
  // Solved at 40 digits with a Newton root finder on the implicit pair.
  const ModelParams p{0.2, 0.1, 0.0066, 1e7};
  const auto n = forward_step(fig2_state(), std::exp(-0.7), p);
  CHECK(rel(n.s, 9997417.8612451060138) < 1e-13);
  CHECK(rel(n.i, 1345.1042679024448234) < 1e-10);
  CHECK(rel(n.r, 1128.1051683716614118) < 1e-10);
  CHECK(rel(n.d, 0.70227470556264826588) < 1e-10);
  CHECK(rel(n.c, 105.70298371302042232) < 1e-10);
}

TEST_CASE("forward_step is monotone in beta for S") {
  const ModelParams p{0.2, 0.1, 0.0066, 1e7};
  double prev = fig2_state().s;
  for (double b = 0.0; b <= 3.0; b += 0.1) {
    const double s = forward_step(fig2_state(), b, p).s;
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("simulate_forward length and geometric decay") {
  const ModelParams p{0.2, 0.1, 0.0066, 1e7};
  const std::vector<double> zeros(10, 0.0);
  const auto t = simulate_forward(fig2_state(), zeros, p);
  REQUIRE(t.size() == 11);
  CHECK(rel(t.states[10].i, 1000 * std::exp(-2.0)) < 1e-12);
  const std::vector<double> one{0.3};
  CHECK(simulate_forward(fig2_state(), one, p).size() == 2);
}

TEST_CASE("simulate_forward is deterministic") {
  const Fig2Protocol proto;
  const auto a = simulate_forward(proto.initial(), proto.midpoint_betas(), proto.params);
  const auto b = simulate_forward(proto.initial(), proto.midpoint_betas(), proto.params);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.states[k].s == b.states[k].s);
    CHECK(a.states[k].i == b.states[k].i);
  }
}

TEST_CASE("midpoint scheme tracks RK4 on the validation protocol") {
  const Fig2Protocol proto;
  const auto mid = simulate_forward(proto.initial(), proto.midpoint_betas(), proto.params);
  const auto rk = rk4_reference(proto.initial(), [&](double t) { return proto.beta(t); }, proto.params, 99, 0.1);
  REQUIRE(mid.size() == rk.size());
  double worst = 0.0, drift = 0.0;
  for (std::size_t k = 0; k < mid.size(); ++k) {
    const auto& a = mid.states[k];
    const auto& b = rk.states[k];
    for (auto [x, y] : {std::pair{a.s, b.s}, {a.i, b.i}, {a.r, b.r}, {a.d, b.d}, {a.c, b.c}})
      if (y > 0) worst = std::max(worst, std::abs(x - y) / y);
    drift = std::max(drift, std::abs(a.total() - 1e7) / 1e7);
  }
  CHECK(worst <= 0.01);
  CHECK(drift <= 1e-3);
}

TEST_CASE("rk4_reference exact subsystem and conservation") {
  const ModelParams p{0.2, 0.1, 0.0066, 1e7};
  const auto t = rk4_reference(fig2_state(), [](double) { return 0.0; }, p, 30, 0.1);
  // With beta = 0 each RK4 substep multiplies I by the degree-4 Taylor factor of exp(-0.2 h).
  const double z = -0.2 * 0.1, g = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t.states[k].s == fig2_state().s);
    CHECK(rel(t.states[k].i, 1000 * std::pow(g, 10.0 * k)) < 1e-12);
    CHECK(rel(t.states[k].i, 1000 * std::exp(-0.2 * k)) < 1e-7);
  }
  const Fig2Protocol proto;
  for (double step : {1.0, 0.1}) {
    const auto r = rk4_reference(proto.initial(), [&](double x) { return proto.beta(x); }, proto.params, 99, step);
    for (const auto& s : r.states) CHECK(std::abs(s.total() - 1e7) <= 1e-9 * 1e7);
  }
}

TEST_CASE("rk4 step 1 vs step 0.1 self-convergence is small") {
  const Fig2Protocol proto;
  auto beta = [&](double x) { return proto.beta(x); };
  const auto coarse = rk4_reference(proto.initial(), beta, proto.params, 99, 1.0);
  const auto fine = rk4_reference(proto.initial(), beta, proto.params, 99, 0.1);
  double gap = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k)
    if (fine.states[k].i > 0) gap = std::max(gap, rel(coarse.states[k].i, fine.states[k].i));
  MESSAGE("rk4 step 1 vs 0.1 max relative gap in I: " << gap);
  CHECK(gap < 0.01);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS((ModelParams{0.0, 0.1, 0.0066, 100}.validate()), DataError);
  CHECK_THROWS_AS((ModelParams{0.2, 0.1, 1.5, 100}.validate()), DataError);
  CHECK_THROWS_AS((ModelParams{0.2, 0.1, 0.0066, 0.5}.validate()), DataError);
  CHECK_NOTHROW((ModelParams{0.2, 0.1, 0.0066, 100}.validate()));
}
