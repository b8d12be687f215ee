#pragma once

#include <cstdint>
#include <vector>

#include "sirdc/date.hpp"
#include "sirdc/ingestion.hpp"
#include "sirdc/model.hpp"

namespace sirdc {

/// The validation protocol with a smoothly decaying transmission rate.
struct Fig2Protocol {
  int days = 100;
  double population = 1e7;
  ModelParams params{0.2, 0.1, 0.0066, 1e7};

  CompartmentState initial() const;
  /// exp(-0.7 (9 (t - 1) / (days - 1) + 1)) at real-valued day t.
  double beta(double t) const;
  /// beta(t + 0.5) for t = 1 .. days - 1.
  std::vector<double> midpoint_betas() const;
};

/// Noisy variant: beta + N(0, noise_sd^2) per midpoint, truncated to [0, kBetaMax].
std::vector<double> noisy_betas(const std::vector<double>& betas, double noise_sd, std::uint64_t seed);

/// Everything needed to synthesize one region's observed series.
struct SyntheticCountySpec {
  std::string region_id = "99001";
  std::string state_id = "SY";
  double population = 1e6;
  double i1 = 1000.0;
  double r1 = 1000.0;
  double d1 = 0.0;
  double alpha = 1.0;
  double c1 = 20.0;                ///< observed confirmed cases on day one
  std::vector<double> betas;       ///< midpoint rates; length = total days - 1
  std::vector<double> positivity;  ///< length = total days
  ModelParams params{};
  Date start = default_day_one_floor();
  bool poisson_noise = false;
  std::uint64_t seed = 0;
};

struct SyntheticCounty {
  RegionSeries series;    ///< observed data with positivity joined
  Trajectory truth;       ///< generating compartments
  double omega = 0.0;
};

/// Simulates the SIRDC system and inverts the positivity-weighted case
/// relation to produce the confirmed series that reproduces S exactly.
/// With poisson_noise, daily confirmed and death increments are Poisson draws.
SyntheticCounty make_synthetic_county(const SyntheticCountySpec& spec);

/// Smooth random midpoint beta path of length n: a few low-frequency
/// harmonics on the log scale around `level`.
std::vector<double> random_beta_path(int n, double level, double log_amplitude, std::uint64_t seed);

/// Declining positivity curve with a mild oscillation, clamped to [0.01, 1].
std::vector<double> synthetic_positivity(int n, std::uint64_t seed);

/// Seeded collection of synthetic counties sharing one state and its positivity.
std::vector<SyntheticCounty> synthetic_counties(int count, int days, std::uint64_t seed,
                                                bool poisson_noise = true, const ModelParams& params = {});

}  // namespace sirdc
