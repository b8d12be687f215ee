#include "sirdc/config.hpp"

#include "json.hpp"

#include "sirdc/error.hpp"

namespace sirdc {

std::optional<ModelParams> preset_params(std::string_view name) {
  if (name == "config1") return ModelParams{0.2, 0.1, 0.0066, 1.0};
  if (name == "config2") return ModelParams{0.14, 0.1, 0.0066, 1.0};
  if (name == "config3") return ModelParams{0.2, 0.067, 0.0066, 1.0};
  if (name == "config4") return ModelParams{0.2, 0.1, 0.0075, 1.0};
  return std::nullopt;
}

void RunConfig::apply_preset(std::string_view name) {
  const auto p = preset_params(name);
  if (!p) throw DataError("unknown preset '" + std::string(name) + "'");
  preset = name;
  gamma = p->gamma;
  theta = p->theta;
  delta = p->delta;
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["input"] = c.input;
  j["positivity"] = c.positivity;
  j["out"] = c.out;
  j["preset"] = c.preset;
  j["gamma"] = c.gamma;
  j["theta"] = c.theta;
  j["delta"] = c.delta;
  j["day_one_floor"] = format_date(c.day_one_floor);
  j["train_end"] = c.train_end ? nlohmann::ordered_json(format_date(*c.train_end)) : nlohmann::ordered_json(nullptr);
  j["horizon"] = c.horizon;
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["format"] = c.format;
  j["min_deaths"] = c.min_deaths;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text, RunConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw DataError("config: top level must be an object");
  try {
    // A preset in the file sets the rates; explicit rates in the same file win.
    if (j.contains("preset")) c.apply_preset(j["preset"].get<std::string>());
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("input", c.input);
    get("positivity", c.positivity);
    get("out", c.out);
    get("gamma", c.gamma);
    get("theta", c.theta);
    get("delta", c.delta);
    get("horizon", c.horizon);
    get("n_samples", c.n_samples);
    get("seed", c.seed);
    get("jobs", c.jobs);
    get("format", c.format);
    get("min_deaths", c.min_deaths);
    if (j.contains("day_one_floor")) c.day_one_floor = parse_date(j["day_one_floor"].get<std::string>());
    if (j.contains("train_end")) {
      if (j["train_end"].is_null())
        c.train_end.reset();
      else
        c.train_end = parse_date(j["train_end"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace sirdc
