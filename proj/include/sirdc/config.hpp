#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "sirdc/date.hpp"
#include "sirdc/model.hpp"

namespace sirdc {

/// Named (gamma, theta, delta) sets from the sensitivity study.
std::optional<ModelParams> preset_params(std::string_view name);

/// Declarative batch-run settings. Flags layered on top win.
struct RunConfig {
  std::string input;
  std::string positivity;
  std::string out = ".";
  std::string preset = "config1";
  double gamma = 0.2;
  double theta = 0.1;
  double delta = 0.0066;
  Date day_one_floor = default_day_one_floor();
  std::optional<Date> train_end;
  int horizon = 21;
  int n_samples = 500;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string format = "csv";
  double min_deaths = 2.0;

  ModelParams params() const { return ModelParams{gamma, theta, delta, 1.0}; }
  /// Copies the preset rates into gamma/theta/delta. Throws DataError on an unknown name.
  void apply_preset(std::string_view name);
};

std::string config_to_json(const RunConfig& config);
/// Keys absent from the document keep the values already in `base`.
RunConfig config_from_json(std::string_view text, RunConfig base = {});

}  // namespace sirdc
