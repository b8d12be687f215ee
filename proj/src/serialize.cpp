#include "sirdc/serialize.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "sirdc/csv.hpp"
#include "sirdc/error.hpp"

namespace sirdc {
namespace {

using Json = nlohmann::ordered_json;

// JSON has no NaN; null stands in.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

Json to_array(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::vector<double> from_array(const Json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x));
  return out;
}

Json dates(std::span<const Date> v) {
  Json a = Json::array();
  for (Date d : v) a.push_back(format_date(d));
  return a;
}

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

void check_schema(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
    throw DataError(std::string(what) + ": unsupported or missing schema_version");
}

}  // namespace

std::string trajectory_csv(const Trajectory& t, const Date* first_date) {
  std::ostringstream os;
  os << (first_date ? "date," : "") << "day,S,I,R,D,C,beta\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& s = t.states[k];
    std::vector<std::string> row;
    if (first_date) row.push_back(format_date(*first_date + std::chrono::days{static_cast<int>(k)}));
    row.insert(row.end(), {std::to_string(s.day), csv::format_number(s.s), csv::format_number(s.i),
                           csv::format_number(s.r), csv::format_number(s.d), csv::format_number(s.c),
                           k < t.betas.size() ? csv::format_number(t.betas[k]) : std::string()});
    os << csv::join(row) << '\n';
  }
  return os.str();
}

std::string fit_to_json(const FitRecord& r) {
  const FitResult& f = r.fit;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["region_id"] = f.region_id;
  j["day_one"] = format_date(f.day_one);
  j["train_end"] = format_date(f.day_one + std::chrono::days{static_cast<int>(f.trajectory.size()) - 1});
  j["params"] = {{"gamma", r.params.gamma},
                 {"theta", r.params.theta},
                 {"delta", r.params.delta},
                 {"population", r.params.population}};
  j["alpha"] = f.alpha;
  j["state_alpha"] = r.state_alpha;
  j["omega"] = number(f.omega);
  j["i1"] = f.i1;
  j["r1"] = f.r1;
  j["upper_bound"] = number(f.upper_bound);
  j["loss_value"] = number(f.loss_value);
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  j["evaluations"] = f.evaluations;
  j["capped_days"] = f.capped_days;
  j["diagnostic"] = f.diagnostic;
  const Trajectory& t = f.trajectory;
  j["trajectory"] = {{"S", to_array(t.susceptible())}, {"I", to_array(t.infectious())}, {"R", to_array(t.resolving())},
                     {"D", to_array(t.deceased())},    {"C", to_array(t.recovered())},  {"beta", to_array(t.betas)}};
  return j.dump(2) + "\n";
}

FitRecord fit_from_json(std::string_view text) {
  const Json j = parse_json(text, "fit record");
  check_schema(j, "fit record");
  FitRecord r;
  try {
    FitResult& f = r.fit;
    f.region_id = j.at("region_id").get<std::string>();
    f.day_one = parse_date(j.at("day_one").get<std::string>());
    const Json& p = j.at("params");
    r.params = {p.at("gamma").get<double>(), p.at("theta").get<double>(), p.at("delta").get<double>(),
                p.at("population").get<double>()};
    f.alpha = j.at("alpha").get<double>();
    r.state_alpha = j.value("state_alpha", f.alpha);
    f.omega = number(j.at("omega"));
    f.i1 = j.at("i1").get<double>();
    f.r1 = j.at("r1").get<double>();
    f.upper_bound = number(j.at("upper_bound"));
    f.loss_value = number(j.at("loss_value"));
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.evaluations = j.at("evaluations").get<int>();
    f.capped_days = j.at("capped_days").get<std::vector<int>>();
    f.diagnostic = j.at("diagnostic").get<std::string>();
    const Json& t = j.at("trajectory");
    const auto S = from_array(t.at("S")), I = from_array(t.at("I")), R = from_array(t.at("R")), D = from_array(t.at("D")),
               C = from_array(t.at("C"));
    f.trajectory.betas = from_array(t.at("beta"));
    if (I.size() != S.size() || R.size() != S.size() || D.size() != S.size() || C.size() != S.size() ||
        (!S.empty() && f.trajectory.betas.size() + 1 != S.size()))
      throw DataError("fit record: trajectory columns have inconsistent lengths");
    for (std::size_t k = 0; k < S.size(); ++k)
      f.trajectory.states.push_back({S[k], I[k], R[k], D[k], C[k], static_cast<int>(k) + 1});
  } catch (const Json::exception& e) {
    throw DataError(std::string("fit record: ") + e.what());
  }
  return r;
}

std::string forecast_csv(const ForecastResult& f) {
  std::ostringstream os;
  os << "date,mean,lower95,upper95\n";
  for (std::size_t k = 0; k < f.dates.size(); ++k)
    os << csv::join({format_date(f.dates[k]), csv::format_number(f.mean_deaths[k]), csv::format_number(f.lower95[k]),
                     csv::format_number(f.upper95[k])})
       << '\n';
  return os.str();
}

std::string forecast_json(const ForecastResult& f, std::string_view method) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["region_id"] = f.region_id;
  j["method"] = method;
  j["horizon_days"] = f.horizon_days;
  j["n_samples"] = f.n_samples;
  j["seed"] = f.seed;
  j["dropped"] = f.dropped;
  j["degraded"] = f.degraded;
  j["confirmed_degenerate"] = f.confirmed_degenerate;
  j["dates"] = dates(f.dates);
  j["mean"] = to_array(f.mean_deaths);
  j["lower95"] = to_array(f.lower95);
  j["upper95"] = to_array(f.upper95);
  j["point"] = to_array(f.point_deaths);
  j["residual_scale2"] = to_array(f.residual_scale2);
  return j.dump(2) + "\n";
}

ForecastTable forecast_from_json(std::string_view text) {
  const Json j = parse_json(text, "forecast");
  check_schema(j, "forecast");
  ForecastTable t;
  try {
    t.region_id = j.at("region_id").get<std::string>();
    t.method = j.value("method", std::string("sirdc-gp"));
    for (const auto& d : j.at("dates")) t.dates.push_back(parse_date(d.get<std::string>()));
    t.mean = from_array(j.at("mean"));
    t.lower95 = from_array(j.at("lower95"));
    t.upper95 = from_array(j.at("upper95"));
  } catch (const Json::exception& e) {
    throw DataError(std::string("forecast: ") + e.what());
  }
  return t;
}

ForecastTable forecast_from_csv(std::string_view text, std::string region_id) {
  const auto rows = csv::parse(text);
  ForecastTable t;
  t.region_id = std::move(region_id);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    if (rows[r].size() < 4) throw ParseError("forecast row needs 4 columns", r + 1, rows[r].size());
    Date d;
    if (!try_parse_date(rows[r][0], d)) throw ParseError("unparseable date", r + 1, 1);
    double v[3];
    for (int c = 0; c < 3; ++c)
      if (!csv::parse_number(rows[r][static_cast<std::size_t>(c) + 1], v[c]))
        throw ParseError("non-numeric forecast cell", r + 1, static_cast<std::size_t>(c) + 2);
    t.dates.push_back(d);
    t.mean.push_back(v[0]);
    t.lower95.push_back(v[1]);
    t.upper95.push_back(v[2]);
  }
  return t;
}

std::string risk_csv(const RiskSeries& risk, Date first_date) {
  std::ostringstream os;
  os << "date,PoC,level,Reff,I\n";
  for (std::size_t k = 0; k < risk.poc.size(); ++k)
    os << csv::join({format_date(first_date + std::chrono::days{static_cast<int>(k)}), csv::format_number(risk.poc[k]),
                     std::string(to_string(risk.level[k])), csv::format_number(risk.reff[k]),
                     csv::format_number(risk.infectious[k])})
       << '\n';
  return os.str();
}

std::string scores_json(const ForecastScores& s, std::string_view method) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = method;
  j["rmse"] = number(s.rmse);
  j["coverage95"] = number(s.coverage95);
  j["mean_interval_length"] = number(s.mean_interval_length);
  j["n_points"] = s.n_points;
  return j.dump(2) + "\n";
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::ostringstream os;
  os << "method,rmse,coverage95,interval_length\n";
  auto cell = [](double v) { return std::isfinite(v) ? csv::format_number(v) : std::string(); };
  for (const auto& r : rows)
    os << csv::join({r.method, cell(r.scores.rmse), cell(r.scores.coverage95), cell(r.scores.mean_interval_length)})
       << '\n';
  return os.str();
}

}  // namespace sirdc
