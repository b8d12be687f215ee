#include "sirdc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sirdc/calibration.hpp"
#include "sirdc/config.hpp"
#include "sirdc/csv.hpp"
#include "sirdc/epi_metrics.hpp"
#include "sirdc/error.hpp"
#include "sirdc/evaluation.hpp"
#include "sirdc/forecast.hpp"
#include "sirdc/ingestion.hpp"
#include "sirdc/parallel.hpp"
#include "sirdc/serialize.hpp"
#include "sirdc/synthetic.hpp"
#include "sirdc/transmission.hpp"

namespace sirdc::cli {
namespace {

// A required flag absent from both the command line and the config file.
struct MissingFlag : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Options shared by every subcommand; applied over the config file.
struct CommonFlags {
  std::string config_path;
  std::string input, positivity, out, preset, format, day_one_floor, train_end;
  double gamma = 0, theta = 0, delta = 0, min_deaths = 0;
  int horizon = 0, samples = 0, jobs = 0;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration; flags override it");
    opts["input"] = app->add_option("--input", input, "input data file or ingested directory");
    opts["positivity"] = app->add_option("--positivity", positivity, "positivity CSV");
    opts["out"] = app->add_option("--out", out, "output directory");
    opts["preset"] = app->add_option("--preset", preset, "parameter preset config1..config4");
    opts["gamma"] = app->add_option("--gamma", gamma, "inverse infectious period");
    opts["theta"] = app->add_option("--theta", theta, "inverse resolving period");
    opts["delta"] = app->add_option("--delta", delta, "fatality fraction");
    opts["horizon"] = app->add_option("--horizon", horizon, "forecast horizon in days")->check(CLI::PositiveNumber);
    opts["samples"] = app->add_option("--samples", samples, "ensemble size")->check(CLI::PositiveNumber);
    opts["seed"] = app->add_option("--seed", seed, "top-level random seed");
    opts["jobs"] = app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    opts["format"] = app->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    opts["day_one_floor"] = app->add_option("--day-one-floor", day_one_floor, "earliest admissible day one");
    opts["train_end"] = app->add_option("--train-end", train_end, "last training date");
    opts["min_deaths"] = app->add_option("--min-deaths", min_deaths, "minimum deaths at train end to fit a county");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) c = config_from_json(read_file(config_path));
    if (given("preset")) c.apply_preset(preset);
    if (given("input")) c.input = input;
    if (given("positivity")) c.positivity = positivity;
    if (given("out")) c.out = out;
    if (given("gamma")) c.gamma = gamma;
    if (given("theta")) c.theta = theta;
    if (given("delta")) c.delta = delta;
    if (given("horizon")) c.horizon = horizon;
    if (given("samples")) c.n_samples = samples;
    if (given("seed")) c.seed = seed;
    if (given("jobs")) c.jobs = jobs;
    if (given("format")) c.format = format;
    if (given("day_one_floor")) c.day_one_floor = parse_date(day_one_floor);
    if (given("train_end")) c.train_end = parse_date(train_end);
    if (given("min_deaths")) c.min_deaths = min_deaths;
    c.params().validate();
    return c;
  }
};

// Regions from a canonical-long file or an ingested directory, normalized
// and joined with positivity.
std::vector<RegionSeries> load_dataset(const RunConfig& c, std::ostream& err) {
  if (c.input.empty()) throw MissingFlag("--input is required");
  fs::path series = c.input, positivity = c.positivity;
  if (fs::is_directory(series)) {
    if (positivity.empty() && fs::exists(series / "positivity.csv")) positivity = series / "positivity.csv";
    series /= "series.csv";
  }
  ParseResult parsed = parse_timeseries(read_file(series), Format::kCanonicalLong);
  for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
  for (auto& r : parsed.regions) normalize_region(r);
  std::map<std::string, PositivitySeries> pos;
  if (!positivity.empty()) pos = parse_positivity(read_file(positivity));
  for (const auto& w : join_positivity(parsed.regions, pos)) err << "warning: " << w << '\n';
  return std::move(parsed.regions);
}

const RegionSeries* find_region(const std::vector<RegionSeries>& regions, const std::string& id) {
  for (const auto& r : regions)
    if (r.region_id == id) return &r;
  return nullptr;
}

std::uint64_t region_seed(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : id) h = (h ^ ch) * 1099511628211ULL;
  return sample_seed(seed, h);
}

// ---- ingest ---------------------------------------------------------------

int cmd_ingest(const RunConfig& c, const std::vector<std::string>& inputs, const std::string& format_tag,
               std::ostream& out, std::ostream& err) {
  if (inputs.empty()) throw MissingFlag("--input is required");
  const Format format = parse_format(format_tag);
  ParseResult parsed;
  if (format == Format::kJhuWide) {
    if (inputs.size() != 2) throw DataError("jhu-wide needs two inputs: confirmed then deaths");
    parsed = merge_jhu(parse_timeseries(read_file(inputs[0]), format, Quantity::kConfirmed),
                       parse_timeseries(read_file(inputs[1]), format, Quantity::kDeaths));
  } else {
    parsed = parse_timeseries(read_file(inputs[0]), format);
  }
  int repairs = 0;
  for (auto& r : parsed.regions) repairs += normalize_region(r);
  std::map<std::string, PositivitySeries> pos;
  if (!c.positivity.empty()) {
    pos = parse_positivity(read_file(c.positivity));
    const auto w = join_positivity(parsed.regions, pos);
    parsed.warnings.insert(parsed.warnings.end(), w.begin(), w.end());
  }
  for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';

  const fs::path dir = c.out;
  write_file(dir / "series.csv", write_canonical_long(parsed.regions));
  if (!pos.empty()) write_file(dir / "positivity.csv", write_positivity(pos));
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["regions"] = parsed.regions.size();
  report["repairs"] = repairs;
  report["warnings"] = parsed.warnings;
  write_file(dir / "ingest_report.json", json_text(report));
  out << "ingested " << parsed.regions.size() << " regions into " << dir.string() << '\n';
  return parsed.regions.empty() ? kDataError : kOk;
}

// ---- fit ------------------------------------------------------------------

struct CountyJob {
  const RegionSeries* region = nullptr;
  CountyData data;
  std::string status;  // "fitted", "skipped" or "failed"
  std::string reason;
  FitResult fit;
};

int cmd_fit(const RunConfig& c, const std::string& region_filter, std::ostream& out, std::ostream& err) {
  const std::vector<RegionSeries> regions = load_dataset(c, err);
  const ModelParams params = c.params();
  std::set<std::string> wanted;
  for (const auto& id : split_list(region_filter)) wanted.insert(id);

  std::vector<CountyJob> jobs;
  for (const auto& r : regions) {
    if (!wanted.empty() && !wanted.count(r.region_id)) continue;
    CountyJob job;
    job.region = &r;
    try {
      const Date day_one = select_day_one(r, c.day_one_floor);
      const Date* end = c.train_end ? &*c.train_end : nullptr;
      if (end && r.index_of(*end) < 0) throw NotFittableError("no data on train end " + format_date(*end));
      job.data = county_window(r, day_one, end);
      if (job.data.cumulative_deaths.back() < c.min_deaths)
        throw NotFittableError("fewer than " + csv::format_number(c.min_deaths) + " deaths at train end");
      if (job.data.size() < 2) throw NotFittableError("training window shorter than two days");
      job.status = "pending";
    } catch (const Error& e) {
      job.status = "skipped";
      job.reason = e.what();
    }
    jobs.push_back(std::move(job));
  }
  for (const auto& id : wanted)
    if (!find_region(regions, id)) throw DataError("region " + id + " not found in input");

  // Phase one: one alpha per state with at least one eligible county.
  std::vector<std::string> states;
  for (const auto& j : jobs)
    if (j.status == "pending" && std::find(states.begin(), states.end(), j.region->state_id) == states.end())
      states.push_back(j.region->state_id);
  std::sort(states.begin(), states.end());
  std::vector<std::optional<StateAlphaFit>> state_fits(states.size());
  std::vector<std::string> state_errors(states.size());
  parallel_for(static_cast<int>(states.size()), c.jobs, [&](int k) {
    try {
      const RegionSeries agg = aggregate_state(regions, states[static_cast<std::size_t>(k)]);
      const Date* end = c.train_end ? &*c.train_end : nullptr;
      const CountyData data = county_window(agg, select_day_one(agg, c.day_one_floor), end);
      state_fits[static_cast<std::size_t>(k)] = fit_state_alpha(data, params);
    } catch (const Error& e) {
      state_errors[static_cast<std::size_t>(k)] = e.what();
    }
  });
  auto state_index = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(states.begin(), states.end(), s) - states.begin());
  };

  // Phase two: counties, independent given their state's alpha.
  parallel_for(static_cast<int>(jobs.size()), c.jobs, [&](int k) {
    CountyJob& job = jobs[static_cast<std::size_t>(k)];
    if (job.status != "pending") return;
    const std::size_t s = state_index(job.region->state_id);
    if (!state_fits[s]) {
      job.status = "failed";
      job.reason = "state alpha fit failed: " + state_errors[s];
      return;
    }
    try {
      job.fit = fit_county_initials(job.data, state_fits[s]->alpha, params);
      job.status = "fitted";
    } catch (const Error& e) {
      job.status = "failed";
      job.reason = e.what();
    }
  });

  const fs::path dir = c.out;
  Json alpha = Json::object();
  alpha["schema_version"] = kSchemaVersion;
  Json state_list = Json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    Json s;
    s["state_id"] = states[k];
    if (state_fits[k]) {
      s["alpha"] = state_fits[k]->alpha;
      s["loss_value"] = state_fits[k]->loss_value;
      s["converged"] = state_fits[k]->converged;
      s["grid_alphas"] = state_fits[k]->grid_alphas;
      s["grid_losses"] = state_fits[k]->grid_losses;
    } else {
      s["alpha"] = nullptr;
      s["error"] = state_errors[k];
    }
    state_list.push_back(s);
  }
  alpha["states"] = state_list;
  write_file(dir / "state_alpha.json", json_text(alpha));

  Json summary;
  summary["schema_version"] = kSchemaVersion;
  Json fitted = Json::array(), skipped = Json::array(), failed = Json::array();
  for (const auto& job : jobs) {
    const std::string& id = job.region->region_id;
    if (job.status == "fitted") {
      FitRecord rec{job.fit, params.with_population(job.data.population),
                    state_fits[state_index(job.region->state_id)]->alpha};
      write_file(dir / "fits" / (id + ".json"), fit_to_json(rec));
      write_file(dir / "trajectories" / (id + ".csv"), trajectory_csv(job.fit.trajectory, &job.fit.day_one));
      fitted.push_back(id);
    } else {
      (job.status == "skipped" ? skipped : failed).push_back({{"region_id", id}, {"reason", job.reason}});
    }
  }
  summary["counts"] = {{"fitted", fitted.size()}, {"skipped", skipped.size()}, {"failed", failed.size()}};
  summary["params"] = {{"gamma", params.gamma}, {"theta", params.theta}, {"delta", params.delta}};
  summary["fitted"] = fitted;
  summary["skipped"] = skipped;
  summary["failed"] = failed;
  write_file(dir / "fit_summary.json", json_text(summary));
  out << "fitted " << fitted.size() << ", skipped " << skipped.size() << ", failed " << failed.size() << '\n';
  if (fitted.empty()) {
    err << "error: no fittable counties\n";
    return failed.empty() ? kDataError : kNumericalError;
  }
  return kOk;
}

// ---- forecast -------------------------------------------------------------

std::vector<FitRecord> load_fits(const fs::path& dir, const std::string& region_filter) {
  std::vector<FitRecord> out;
  const auto wanted = split_list(region_filter);
  if (!wanted.empty()) {
    for (const auto& id : wanted) {
      const fs::path p = dir / "fits" / (id + ".json");
      if (!fs::exists(p)) throw DataError("missing fit for region " + id + " (" + p.string() + ")");
      out.push_back(fit_from_json(read_file(p)));
    }
    return out;
  }
  if (!fs::is_directory(dir / "fits")) throw DataError("no fits directory under " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "fits"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(fit_from_json(read_file(f)));
  if (out.empty()) throw DataError("no fit files under " + (dir / "fits").string());
  return out;
}

CountyData training_window(const std::vector<RegionSeries>& regions, const FitRecord& rec) {
  const RegionSeries* r = find_region(regions, rec.fit.region_id);
  if (!r) throw DataError("region " + rec.fit.region_id + " has a fit but no input data");
  const Date end = rec.fit.day_one + std::chrono::days{static_cast<int>(rec.fit.trajectory.size()) - 1};
  return county_window(*r, rec.fit.day_one, &end);
}

int cmd_forecast(const RunConfig& c, const std::string& fits_dir, const std::string& region_filter,
                 const std::string& method, std::ostream& out, std::ostream& err) {
  const std::vector<RegionSeries> regions = load_dataset(c, err);
  const std::vector<FitRecord> fits = load_fits(fits_dir.empty() ? c.out : fits_dir, region_filter);
  const fs::path dir = fs::path(c.out) / "forecasts";
  for (const auto& rec : fits) {
    const CountyData data = training_window(regions, rec);
    ForecastResult f;
    if (method == "gp-const") {
      const BaselineForecast b = gp_constant_mean_forecast(data, c.horizon);
      f.region_id = data.region_id;
      f.horizon_days = c.horizon;
      f.mean_deaths = b.mean;
      f.lower95 = b.lower95;
      f.upper95 = b.upper95;
      for (int j = 0; j < c.horizon; ++j)
        f.dates.push_back(data.day_one + std::chrono::days{static_cast<int>(data.size()) + j});
    } else {
      ForecastOptions opt;
      opt.horizon = c.horizon;
      opt.n_samples = c.n_samples;
      opt.seed = region_seed(c.seed, data.region_id);
      opt.jobs = c.jobs;
      opt.residual_gp = method == "sirdc-gp";
      f = ensemble_forecast(rec.fit, data, rec.params, opt);
      if (f.degraded) err << "warning: forecast for " << f.region_id << " dropped " << f.dropped << " samples\n";
    }
    if (c.format == "json")
      write_file(dir / (f.region_id + ".json"), forecast_json(f, method));
    else
      write_file(dir / (f.region_id + ".csv"), forecast_csv(f));
  }
  out << "forecast " << fits.size() << " regions\n";
  return kOk;
}

// ---- scenario -------------------------------------------------------------

int cmd_scenario(const RunConfig& c, const std::string& fits_dir, const std::string& region_filter, double period,
                 std::ostream& out) {
  const std::vector<FitRecord> fits = load_fits(fits_dir.empty() ? c.out : fits_dir, region_filter);
  const fs::path dir = fs::path(c.out) / "scenarios";
  for (const auto& rec : fits) {
    const Counterfactual base = scenario_counterfactual(rec.fit, 1.0 / rec.params.gamma, rec.params);
    const Counterfactual alt = scenario_counterfactual(rec.fit, period, rec.params);
    std::ostringstream os;
    os << "date,baseline_D,counterfactual_D,deaths_averted,baseline_Reff,counterfactual_Reff,baseline_PoC,"
          "counterfactual_PoC\n";
    const std::size_t T = base.trajectory.size();
    for (std::size_t k = 0; k < T; ++k) {
      const double bd = base.trajectory.states[k].d, cd = alt.trajectory.states[k].d;
      auto at = [&](const std::vector<double>& v) { return k < v.size() ? csv::format_number(v[k]) : std::string(); };
      os << csv::join({format_date(rec.fit.day_one + std::chrono::days{static_cast<int>(k)}), csv::format_number(bd),
                       csv::format_number(cd), csv::format_number(bd - cd), at(base.risk.reff), at(alt.risk.reff),
                       at(base.risk.poc), at(alt.risk.poc)})
         << '\n';
    }
    const std::string stem = rec.fit.region_id;
    write_file(dir / (stem + ".csv"), os.str());
    Json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["region_id"] = rec.fit.region_id;
    meta["gamma"] = rec.params.gamma;
    meta["infectious_period"] = period;
    meta["gamma_prime"] = alt.gamma;
    meta["final_baseline_deaths"] = base.trajectory.states.back().d;
    meta["final_counterfactual_deaths"] = alt.trajectory.states.back().d;
    meta["deaths_averted"] = base.trajectory.states.back().d - alt.trajectory.states.back().d;
    write_file(dir / (stem + ".json"), json_text(meta));
  }
  out << "scenario for " << fits.size() << " regions at period " << csv::format_number(period) << '\n';
  return kOk;
}

// ---- score ----------------------------------------------------------------

std::string run_label(const std::string& dir) {
  fs::path p = fs::path(dir).lexically_normal();
  if (!p.has_filename()) p = p.parent_path();
  if (p.filename() == "forecasts") p = p.parent_path();
  return p.filename().string();
}

int cmd_score(const RunConfig& c, const std::vector<std::string>& forecast_dirs, std::ostream& out,
              std::ostream& err) {
  if (forecast_dirs.empty()) throw MissingFlag("--forecasts is required");
  const std::vector<RegionSeries> regions = load_dataset(c, err);
  std::map<std::string, std::vector<ScoredSeries>> by_method;
  std::map<std::string, std::vector<CorrelationInput>> corr_by_method;
  std::vector<std::string> order;
  for (const auto& d : forecast_dirs) {
    fs::path dir = d;
    // Each directory is one method. CSV forecasts carry no method, so those
    // are labelled by the run directory name.
    std::string label = run_label(d);
    if (fs::is_directory(dir / "forecasts")) dir /= "forecasts";
    if (!fs::is_directory(dir)) throw DataError("no forecast directory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json" || e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no forecasts under " + dir.string());
    for (const auto& f : files) {
      const std::string text = read_file(f);
      const ForecastTable t = f.extension() == ".json" ? forecast_from_json(text)
                                                        : forecast_from_csv(text, f.stem().string());
      const RegionSeries* r = find_region(regions, t.region_id);
      if (!r) throw DataError("missing truths for region " + t.region_id);
      ScoredSeries s{t.region_id, t.mean, t.lower95, t.upper95, {}};
      for (Date day : t.dates) {
        const long k = r->index_of(day);
        if (k < 0) throw DataError("missing truth for region " + t.region_id + " on " + format_date(day));
        s.truth.push_back(r->cumulative_deaths[static_cast<std::size_t>(k)]);
      }
      if (f == files.front()) {
        if (f.extension() == ".json") label = t.method;
        const std::string base = label;
        for (int n = 2; by_method.count(label); ++n) label = base + "#" + std::to_string(n);
        order.push_back(label);
      }
      corr_by_method[label].push_back({t.region_id, s.prediction, s.truth, r->population});
      by_method[label].push_back(std::move(s));
    }
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json list = Json::array();
  std::vector<ComparisonRow> rows;
  for (const auto& m : order) {
    const ForecastScores s = forecast_scores(by_method[m]);
    rows.push_back({m, s});
    Json e = Json::parse(scores_json(s, m));
    e.erase("schema_version");
    try {
      const CorrelationScores cs = correlation_scores(corr_by_method[m]);
      e["rho_pooled"] = cs.rho_pooled;
      e["rho_county_weighted"] = cs.rho_county_weighted;
      e["rho_excluded"] = cs.excluded;
    } catch (const DataError&) {
      e["rho_pooled"] = nullptr;
      e["rho_county_weighted"] = nullptr;
    }
    list.push_back(e);
  }
  j["scores"] = list;
  const fs::path dir = c.out;
  write_file(dir / "scores.json", json_text(j));
  if (rows.size() > 1) write_file(dir / "comparison.csv", comparison_csv(rows));
  for (const auto& r : rows)
    out << r.method << ": rmse " << csv::format_number(r.scores.rmse) << ", coverage95 "
        << csv::format_number(r.scores.coverage95) << '\n';
  return kOk;
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const RunConfig& c, double noise_sd, int counties, int days, int future, std::ostream& out) {
  const fs::path dir = c.out;
  const Fig2Protocol proto;
  const std::vector<double> truth_betas =
      noise_sd > 0.0 ? noisy_betas(proto.midpoint_betas(), noise_sd, c.seed) : proto.midpoint_betas();
  const Trajectory truth = simulate_forward(proto.initial(), truth_betas, proto.params);
  // Noisy rates are held piecewise constant over each day in the reference.
  auto beta_fn = [&](double t) {
    if (noise_sd <= 0.0) return proto.beta(t);
    const auto k = std::clamp<long>(static_cast<long>(std::floor(t)) - 1, 0, static_cast<long>(truth_betas.size()) - 1);
    return truth_betas[static_cast<std::size_t>(k)];
  };
  const Trajectory rk4 = rk4_reference(proto.initial(), beta_fn, proto.params, proto.days - 1, 0.1);
  const BetaRecovery rec = recover_beta_series(truth.susceptible(), truth.states.front().i, proto.params);

  std::ostringstream os;
  os << "day,beta_true,beta_recovered,absolute_error\n";
  double max_beta_err = 0.0, mean_abs_err = 0.0, max_rk4_err = 0.0;
  for (std::size_t k = 0; k < rec.betas.size(); ++k) {
    const double e = std::abs(rec.betas[k] - truth_betas[k]);
    if (truth_betas[k] > 0.0) max_beta_err = std::max(max_beta_err, e / truth_betas[k]);
    mean_abs_err += e / static_cast<double>(rec.betas.size());
    os << csv::join({std::to_string(k + 1), csv::format_number(truth_betas[k]), csv::format_number(rec.betas[k]),
                     csv::format_number(e)})
       << '\n';
  }
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const auto& a = truth.states[k];
    const auto& b = rk4.states[k];
    for (auto [x, y] : {std::pair{a.s, b.s}, {a.i, b.i}, {a.r, b.r}, {a.d, b.d}, {a.c, b.c}})
      if (y > 0.0) max_rk4_err = std::max(max_rk4_err, std::abs(x - y) / y);
  }
  write_file(dir / "simulation" / "midpoint.csv", trajectory_csv(truth));
  write_file(dir / "simulation" / "rk4.csv", trajectory_csv(rk4));
  write_file(dir / "simulation" / "recovery.csv", os.str());
  Json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["days"] = proto.days;
  summary["population"] = proto.population;
  summary["noise_sd"] = noise_sd;
  summary["seed"] = c.seed;
  summary["max_beta_relative_error"] = max_beta_err;
  summary["mean_beta_absolute_error"] = mean_abs_err;
  summary["max_relative_error_vs_rk4"] = max_rk4_err;
  summary["capped_days"] = rec.capped_days;
  write_file(dir / "simulation" / "summary.json", json_text(summary));
  out << "max beta relative error " << csv::format_number(max_beta_err) << '\n';

  if (counties > 0) {
    const auto synth = synthetic_counties(counties, days + future, c.seed, true, c.params());
    std::vector<RegionSeries> series;
    for (const auto& s : synth) series.push_back(s.series);
    write_file(dir / "series.csv", write_canonical_long(series));
    write_file(dir / "positivity.csv", write_positivity(positivity_from_regions(series)));
    out << "wrote " << counties << " synthetic counties to " << dir.string() << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SIRDC county-level transmission fitting and forecasting"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonFlags ingest_f, fit_f, forecast_f, scenario_f, score_f, simulate_f;
  std::vector<std::string> ingest_inputs, score_forecasts;
  std::string input_format = "canonical-long", regions, fits_dir, method = "sirdc-gp";
  double period = 4.75, noise_sd = 0.0;
  int counties = 0, days = 100, future = 21;

  auto* ingest = app.add_subcommand("ingest", "parse, repair and join raw time series");
  ingest_f.attach(ingest);
  ingest->remove_option(ingest_f.opts["input"]);
  ingest_f.opts["input"] = ingest->add_option("--input", ingest_inputs, "series file(s); jhu-wide: confirmed deaths")
                               ->expected(1, 2);
  ingest->add_option("--input-format", input_format, "jhu-wide or canonical-long")
      ->check(CLI::IsMember({"jhu-wide", "canonical-long"}));

  auto* fit = app.add_subcommand("fit", "fit state alpha then county initial values");
  fit_f.attach(fit);
  fit->add_option("--regions", regions, "comma-separated region ids");

  auto* forecast = app.add_subcommand("forecast", "ensemble death forecasts from fits");
  forecast_f.attach(forecast);
  forecast->add_option("--fits", fits_dir, "directory holding fits/ (defaults to --out)");
  forecast->add_option("--regions", regions, "comma-separated region ids");
  forecast->add_option("--method", method, "sirdc-gp, sirdc or gp-const")
      ->check(CLI::IsMember({"sirdc-gp", "sirdc", "gp-const"}));

  auto* scenario = app.add_subcommand("scenario", "infectious-period counterfactuals");
  scenario_f.attach(scenario);
  scenario->add_option("--fits", fits_dir, "directory holding fits/ (defaults to --out)");
  scenario->add_option("--regions", regions, "comma-separated region ids");
  scenario->add_option("--period", period, "new infectious period in days")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "score forecasts against observed deaths");
  score_f.attach(score);
  score->add_option("--forecasts", score_forecasts, "forecast directories (one per method)")->required();

  auto* simulate = app.add_subcommand("simulate", "run the synthetic recovery protocol");
  simulate_f.attach(simulate);
  simulate->add_option("--noise-sd", noise_sd, "sd of additive beta noise")->check(CLI::NonNegativeNumber);
  simulate->add_option("--counties", counties, "also write this many synthetic counties")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--days", days, "synthetic training days")->check(CLI::Range(4, 10000));
  simulate->add_option("--future", future, "synthetic days beyond training")->check(CLI::NonNegativeNumber);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*ingest) {
      RunConfig c = ingest_f.resolve();
      return cmd_ingest(c, ingest_inputs, input_format, out, err);
    }
    if (*fit) return cmd_fit(fit_f.resolve(), regions, out, err);
    if (*forecast) return cmd_forecast(forecast_f.resolve(), fits_dir, regions, method, out, err);
    if (*scenario) return cmd_scenario(scenario_f.resolve(), fits_dir, regions, period, out);
    if (*score) return cmd_score(score_f.resolve(), score_forecasts, out, err);
    if (*simulate) return cmd_simulate(simulate_f.resolve(), noise_sd, counties, days, future, out);
  } catch (const MissingFlag& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InfeasibleError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace sirdc::cli
