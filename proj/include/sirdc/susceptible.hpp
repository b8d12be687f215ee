#pragma once

#include <span>
#include <vector>

#include "sirdc/model.hpp"

namespace sirdc {

/// Positivity floor applied at ingestion; p = 0 with alpha > 0 would erase
/// the unobserved-case adjustment.
inline constexpr double kPositivityFloor = 0.01;

struct PositivityAdjustment {
  double alpha = 1.0;  ///< power on the test-positive rate, in [0, 2]
  double omega = 1.0;  ///< reporting weight, > 0
};

/// Observed case inputs for one region on a common daily grid.
struct CaseInputs {
  std::vector<double> daily_confirmed;       ///< daily_confirmed[0] is unused
  std::vector<double> cumulative_confirmed;  ///< non-decreasing
  std::vector<double> positivity;            ///< in [kPositivityFloor, 1]
  double population = 1.0;

  /// Derives the daily increments from a cumulative series.
  static CaseInputs from_cumulative(std::span<const double> cumulative, std::span<const double> positivity,
                                    double population);

  std::size_t size() const { return cumulative_confirmed.size(); }
};

/// Positivity-weighted cumulative confirmed count through each day:
/// p(1)^a c(1) + sum_{s=2..t} p(s)^a dc(s).
std::vector<double> weighted_cumulative_cases(const CaseInputs& inputs, double alpha);

/// S(t) = N - weighted_cumulative(t) / omega. Throws InfeasibleError naming
/// the first day with S(t) <= 0.
std::vector<double> build_susceptible_series(const CaseInputs& inputs, const PositivityAdjustment& adj);

/// Weight that makes day one consistent: omega = p1^a c1 / (I1 + R1 + D1 + C1).
double compute_omega(double p1, double alpha, double c1, const CompartmentState& initial);

/// Largest admissible I(1) + R(1) keeping S(t) > 0 over the whole window.
/// Throws InfeasibleError when the bound is not positive.
double compute_upper_bound(const CaseInputs& inputs, double alpha, double d1, double c1_recovered);

}  // namespace sirdc
