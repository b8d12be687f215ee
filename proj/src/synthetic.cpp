#include "sirdc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sirdc/error.hpp"
#include "sirdc/forecast.hpp"
#include "sirdc/susceptible.hpp"
#include "sirdc/transmission.hpp"

namespace sirdc {

CompartmentState Fig2Protocol::initial() const {
  CompartmentState s;
  s.s = population - 2000.0;
  s.i = 1000.0;
  s.r = 1000.0;
  return s;
}

double Fig2Protocol::beta(double t) const {
  return std::exp(-0.7 * (9.0 * (t - 1.0) / (days - 1) + 1.0));
}

std::vector<double> Fig2Protocol::midpoint_betas() const {
  std::vector<double> out(static_cast<std::size_t>(days - 1));
  for (int t = 1; t < days; ++t) out[static_cast<std::size_t>(t - 1)] = beta(t + 0.5);
  return out;
}

std::vector<double> noisy_betas(const std::vector<double>& betas, double noise_sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, noise_sd);
  std::vector<double> out(betas.size());
  for (std::size_t k = 0; k < betas.size(); ++k)
    out[k] = std::clamp(betas[k] + eps(rng), 0.0, kBetaMax);
  return out;
}

SyntheticCounty make_synthetic_county(const SyntheticCountySpec& spec) {
  const std::size_t n = spec.betas.size() + 1;
  if (spec.positivity.size() != n) throw DataError("positivity length must equal betas length + 1");
  const ModelParams p = spec.params.with_population(spec.population);

  CompartmentState first;
  first.i = spec.i1;
  first.r = spec.r1;
  first.d = spec.d1;
  first.s = spec.population - spec.i1 - spec.r1 - spec.d1;

  SyntheticCounty out;
  out.truth = simulate_forward(first, spec.betas, p);
  out.omega = std::pow(spec.positivity[0], spec.alpha) * spec.c1 / (spec.population - first.s);

  std::mt19937_64 rng(spec.seed);
  auto draw = [&](double mean) {
    if (!spec.poisson_noise) return mean;
    if (mean <= 0.0) return 0.0;
    std::poisson_distribution<long long> pois(mean);
    return static_cast<double>(pois(rng));
  };

  RegionSeries& s = out.series;
  s.region_id = spec.region_id;
  s.state_id = spec.state_id;
  s.population = spec.population;
  s.positivity = spec.positivity;
  double conf = spec.c1, deaths = spec.d1;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const double ds = out.truth.states[t - 1].s - out.truth.states[t].s;
      conf += draw(out.omega * std::max(0.0, ds) / std::pow(spec.positivity[t], spec.alpha));
      deaths += draw(std::max(0.0, out.truth.states[t].d - out.truth.states[t - 1].d));
    }
    s.dates.push_back(spec.start + std::chrono::days{static_cast<int>(t)});
    s.cumulative_confirmed.push_back(conf);
    s.cumulative_deaths.push_back(spec.poisson_noise ? deaths : out.truth.states[t].d);
  }
  return out;
}

std::vector<double> random_beta_path(int n, double level, double log_amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr int kHarmonics = 3;
  double amp[kHarmonics], period[kHarmonics], phase[kHarmonics];
  for (int h = 0; h < kHarmonics; ++h) {
    amp[h] = gauss(rng) / (h + 1);
    period[h] = 60.0 + 80.0 * unit(rng);
    phase[h] = 2.0 * std::numbers::pi * unit(rng);
    period[h] /= (h + 1);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double x = 0.0;
    for (int h = 0; h < kHarmonics; ++h) x += amp[h] * std::sin(2.0 * std::numbers::pi * k / period[h] + phase[h]);
    out[static_cast<std::size_t>(k)] = std::clamp(level * std::exp(log_amplitude * x), 1e-4, kBetaMax);
  }
  return out;
}

std::vector<double> synthetic_positivity(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double start = 0.2 + 0.15 * unit(rng);
  const double floor = 0.03 + 0.04 * unit(rng);
  const double decay = 20.0 + 30.0 * unit(rng);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v = floor + (start - floor) * std::exp(-k / decay) + 0.01 * std::sin(k / 9.0);
    out[static_cast<std::size_t>(k)] = std::clamp(v, kPositivityFloor, 1.0);
  }
  return out;
}

std::vector<SyntheticCounty> synthetic_counties(int count, int days, std::uint64_t seed, bool poisson_noise,
                                                const ModelParams& params) {
  std::vector<SyntheticCounty> out;
  const std::vector<double> positivity = synthetic_positivity(days, sample_seed(seed, 0x5057));
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = sample_seed(seed, static_cast<std::uint64_t>(k));
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SyntheticCountySpec spec;
    spec.region_id = std::to_string(99001 + k);
    spec.population = std::round(2e5 + 1.8e6 * unit(rng));
    spec.i1 = std::round(300.0 + 1500.0 * unit(rng));
    spec.r1 = std::round(300.0 + 1500.0 * unit(rng));
    spec.d1 = std::round(3.0 * unit(rng));
    // 10% to 30% of day-one infections have been confirmed.
    spec.c1 = std::round((0.1 + 0.2 * unit(rng)) * (spec.i1 + spec.r1 + spec.d1));
    spec.alpha = 1.0;
    spec.params = params;
    spec.positivity = positivity;
    spec.betas = random_beta_path(days - 1, params.gamma * (0.9 + 0.4 * unit(rng)), 0.25, s ^ 0xbe7a);
    spec.poisson_noise = poisson_noise;
    spec.seed = s ^ 0x0b5e;
    out.push_back(make_synthetic_county(spec));
  }
  return out;
}

}  // namespace sirdc
