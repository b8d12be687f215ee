#include "sirdc/susceptible.hpp"

#include <cmath>

#include "sirdc/error.hpp"

namespace sirdc {

CaseInputs CaseInputs::from_cumulative(std::span<const double> cumulative, std::span<const double> positivity,
                                       double population) {
  if (cumulative.size() != positivity.size()) throw DataError("case and positivity series differ in length");
  CaseInputs in;
  in.population = population;
  in.cumulative_confirmed.assign(cumulative.begin(), cumulative.end());
  in.positivity.assign(positivity.begin(), positivity.end());
  in.daily_confirmed.resize(cumulative.size(), 0.0);
  for (std::size_t t = 1; t < cumulative.size(); ++t) in.daily_confirmed[t] = cumulative[t] - cumulative[t - 1];
  if (!cumulative.empty()) in.daily_confirmed[0] = cumulative[0];
  return in;
}

std::vector<double> weighted_cumulative_cases(const CaseInputs& inputs, double alpha) {
  const std::size_t T = inputs.size();
  if (T == 0) throw DataError("empty case series");
  if (inputs.positivity.size() != T || inputs.daily_confirmed.size() != T)
    throw DataError("case inputs are not aligned on one day grid");
  std::vector<double> out(T);
  double acc = std::pow(inputs.positivity[0], alpha) * inputs.cumulative_confirmed[0];
  out[0] = acc;
  for (std::size_t t = 1; t < T; ++t) {
    acc += std::pow(inputs.positivity[t], alpha) * inputs.daily_confirmed[t];
    out[t] = acc;
  }
  return out;
}

std::vector<double> build_susceptible_series(const CaseInputs& inputs, const PositivityAdjustment& adj) {
  if (!(adj.omega > 0.0)) throw DataError("omega must be positive");
  std::vector<double> s = weighted_cumulative_cases(inputs, adj.alpha);
  for (std::size_t t = 0; t < s.size(); ++t) {
    s[t] = inputs.population - s[t] / adj.omega;
    if (!(s[t] > 0.0)) throw InfeasibleError("weight yields a non-positive susceptible count", static_cast<int>(t) + 1);
  }
  return s;
}

double compute_omega(double p1, double alpha, double c1, const CompartmentState& initial) {
  const double denom = initial.i + initial.r + initial.d + initial.c;
  if (!(denom > 0.0)) throw InfeasibleError("degenerate initialization: I+R+D+C is zero on day one");
  if (!(c1 > 0.0)) throw InfeasibleError("degenerate initialization: no confirmed cases on day one");
  return std::pow(p1, alpha) * c1 / denom;
}

double compute_upper_bound(const CaseInputs& inputs, double alpha, double d1, double c1_recovered) {
  const std::vector<double> w = weighted_cumulative_cases(inputs, alpha);
  if (!(w.back() > 0.0)) throw InfeasibleError("no confirmed cases in window");
  const double u = inputs.population * w.front() / w.back() - (d1 + c1_recovered);
  if (!(u > 0.0)) throw InfeasibleError("no feasible initialization: upper bound on I(1)+R(1) is not positive");
  return u;
}

}  // namespace sirdc
