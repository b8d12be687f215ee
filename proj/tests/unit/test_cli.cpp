#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sirdc/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sirdc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Every regular file below `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sirdc_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

// Shared synthetic dataset: two counties, 60 training days plus 14 held out.
const TempDir& dataset() {
  static TempDir d("data");
  static bool made = false;
  if (!made) {
    REQUIRE(run({"simulate", "--out", d / "sim", "--counties", "2", "--days", "60", "--future", "14", "--seed", "3"})
                .code == 0);
    made = true;
  }
  return d;
}

const std::string kTrainEnd = "2020-05-19";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"fit", "--bogus"}).code == 1);
  CHECK(run({"forecast", "--format", "xml"}).code == 1);
  CHECK(run({"fit"}).code == 1);
  CHECK(run({"score", "--input", "x.csv"}).code == 1);
}

TEST_CASE("fit writes one record per county and is byte-identical on rerun") {
  const auto& d = dataset();
  TempDir a("fit_a"), b("fit_b");
  const auto r = run({"fit", "--input", d / "sim", "--out", a / "run", "--train-end", kTrainEnd, "--jobs", "2"});
  CHECK(r.code == 0);
  CHECK(fs::exists(a.path / "run/fits/99001.json"));
  CHECK(fs::exists(a.path / "run/fits/99002.json"));
  CHECK(fs::exists(a.path / "run/trajectories/99001.csv"));
  const auto summary = nlohmann::json::parse(slurp(a.path / "run/fit_summary.json"));
  CHECK(summary["counts"]["fitted"] == 2);
  CHECK(run({"fit", "--input", d / "sim", "--out", b / "run", "--train-end", kTrainEnd}).code == 0);
  CHECK(snapshot(a.path / "run") == snapshot(b.path / "run"));
}

TEST_CASE("fit with no county reaching five cases exits nonzero") {
  TempDir t("nofit");
  spit(t.path / "series.csv",
       "date,region_id,state_id,population,cum_confirmed,cum_deaths\n"
       "2020-03-21,1,AL,1000,1,0\n2020-03-22,1,AL,1000,2,0\n2020-03-23,1,AL,1000,4,1\n");
  const auto r = run({"fit", "--input", t / "series.csv", "--out", t / "out"});
  CHECK(r.code == 2);
  CHECK(r.err.find("no fittable counties") != std::string::npos);
}

TEST_CASE("forecast: success, determinism, missing fit") {
  const auto& d = dataset();
  TempDir t("forecast");
  REQUIRE(run({"fit", "--input", d / "sim", "--out", t / "run", "--train-end", kTrainEnd}).code == 0);
  const std::vector<std::string> base{"forecast", "--input", d / "sim", "--fits", t / "run", "--samples", "60",
                                      "--horizon", "14", "--seed", "9"};
  auto args = base;
  args.insert(args.end(), {"--out", t / "f1", "--jobs", "3"});
  CHECK(run(args).code == 0);
  args = base;
  args.insert(args.end(), {"--out", t / "f2"});
  CHECK(run(args).code == 0);
  CHECK(snapshot(t.path / "f1") == snapshot(t.path / "f2"));
  const std::string csv = slurp(t.path / "f1/forecasts/99001.csv");
  CHECK(csv.rfind("date,mean,lower95,upper95\n2020-05-20,", 0) == 0);

  args = base;
  args.insert(args.end(), {"--out", t / "f3", "--regions", "99001,31337"});
  const auto r = run(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("31337") != std::string::npos);
}

TEST_CASE("scenario: unchanged period, preset period metadata, deaths averted") {
  const auto& d = dataset();
  TempDir t("scenario");
  REQUIRE(run({"fit", "--input", d / "sim", "--out", t / "run", "--train-end", kTrainEnd}).code == 0);
  REQUIRE(run({"scenario", "--fits", t / "run", "--out", t / "same", "--period", "5"}).code == 0);
  std::istringstream rows(slurp(t.path / "same/scenarios/99001.csv"));
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    CHECK(f[1] == f[2]);
    CHECK(f[3] == "0");
  }
  REQUIRE(run({"scenario", "--fits", t / "run", "--out", t / "short", "--period", "4.75"}).code == 0);
  const auto meta = nlohmann::json::parse(slurp(t.path / "short/scenarios/99001.json"));
  CHECK(meta["gamma_prime"].get<double>() == 1.0 / 4.75);
  CHECK(meta["deaths_averted"].get<double>() >= 0.0);
}

TEST_CASE("score: perfect forecast, hand case, missing truths") {
  TempDir t("score");
  spit(t.path / "series.csv",
       "date,region_id,state_id,population,cum_confirmed,cum_deaths\n"
       "2020-04-01,1,AL,1000,10,0\n2020-04-02,1,AL,1000,12,4\n"
       "2020-04-01,2,AL,3000,10,0\n2020-04-02,2,AL,3000,12,7\n");
  spit(t.path / "perfect/1.csv", "date,mean,lower95,upper95\n2020-04-02,4,3,5\n");
  spit(t.path / "perfect/2.csv", "date,mean,lower95,upper95\n2020-04-02,7,6,8\n");
  REQUIRE(run({"score", "--input", t / "series.csv", "--forecasts", t / "perfect", "--out", t / "s1"}).code == 0);
  auto j = nlohmann::json::parse(slurp(t.path / "s1/scores.json"));
  CHECK(j["scores"][0]["rmse"].get<double>() == 0.0);
  CHECK(j["scores"][0]["coverage95"].get<double>() == 1.0);

  spit(t.path / "hand/1.csv", "date,mean,lower95,upper95\n2020-04-02,7,0,10\n");
  spit(t.path / "hand/2.csv", "date,mean,lower95,upper95\n2020-04-02,3,0,10\n");
  REQUIRE(run({"score", "--input", t / "series.csv", "--forecasts", t / "hand", "--out", t / "s2"}).code == 0);
  j = nlohmann::json::parse(slurp(t.path / "s2/scores.json"));
  CHECK(j["scores"][0]["rmse"].get<double>() == doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-15));

  // One entry per directory: CSV forecasts take the directory name, JSON
  // forecasts their recorded method, made unique on collision.
  REQUIRE(run({"score", "--input", t / "series.csv", "--forecasts", t / "perfect", t / "hand/", "--out", t / "s4"})
              .code == 0);
  j = nlohmann::json::parse(slurp(t.path / "s4/scores.json"));
  REQUIRE(j["scores"].size() == 2);
  CHECK(j["scores"][0]["method"] == "perfect");
  CHECK(j["scores"][0]["n_points"] == 2);
  CHECK(j["scores"][1]["method"] == "hand");
  CHECK(j["scores"][1]["rmse"].get<double>() == doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-15));
  CHECK(slurp(t.path / "s4/comparison.csv").rfind("method,rmse,coverage95,interval_length\nperfect,0,1,", 0) == 0);

  const std::string fc = R"({"schema_version": 1, "region_id": "1", "method": "gp-const", "dates": ["2020-04-02"],
                             "mean": [4], "lower95": [3], "upper95": [5]})";
  spit(t.path / "j1/forecasts/1.json", fc);
  spit(t.path / "j2/forecasts/1.json", fc);
  REQUIRE(run({"score", "--input", t / "series.csv", "--forecasts", t / "j1", t / "j2", "--out", t / "s5"}).code == 0);
  j = nlohmann::json::parse(slurp(t.path / "s5/scores.json"));
  CHECK(j["scores"][0]["method"] == "gp-const");
  CHECK(j["scores"][1]["method"] == "gp-const#2");

  spit(t.path / "late/1.csv", "date,mean,lower95,upper95\n2020-04-03,4,3,5\n");
  const auto r = run({"score", "--input", t / "series.csv", "--forecasts", t / "late", "--out", t / "s3"});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing truth") != std::string::npos);
}

TEST_CASE("ingest jhu-wide and canonical files") {
  TempDir t("ingest");
  const std::string data = SIRDC_TEST_DATA;
  const auto r = run({"ingest", "--input-format", "jhu-wide", "--input", data + "/jhu_confirmed.csv", "--input",
                      data + "/jhu_deaths.csv", "--positivity", data + "/tracking_positivity.csv", "--out", t / "i"});
  CHECK(r.code == 0);
  CHECK(slurp(t.path / "i/series.csv") ==
        "date,region_id,state_id,population,cum_confirmed,cum_deaths\n2020-03-21,01001,AL,55869,7,1\n");
  CHECK(fs::exists(t.path / "i/positivity.csv"));
  CHECK(run({"ingest", "--input", data + "/canonical_bad_death.csv", "--out", t / "bad"}).code == 2);
}

TEST_CASE("config file with flag overrides") {
  const auto& d = dataset();
  TempDir t("config");
  spit(t.path / "run.json", R"({"preset": "config2", "train_end": ")" + kTrainEnd + R"(", "input": ")" +
                                d / "sim" + R"("})");
  REQUIRE(run({"fit", "--config", t / "run.json", "--out", t / "a", "--preset", "config3"}).code == 0);
  const auto summary = nlohmann::json::parse(slurp(t.path / "a/fit_summary.json"));
  CHECK(summary["params"]["gamma"].get<double>() == 0.2);
  CHECK(summary["params"]["theta"].get<double>() == 0.067);
  CHECK(run({"fit", "--config", t / "missing.json"}).code == 2);
}

TEST_CASE("simulate output is byte-identical on rerun") {
  TempDir a("sim_a"), b("sim_b");
  for (const auto* dir : {&a, &b})
    REQUIRE(run({"simulate", "--out", *dir / "s", "--noise-sd", "0.2", "--seed", "4", "--counties", "1"}).code == 0);
  CHECK(snapshot(a.path / "s") == snapshot(b.path / "s"));
}

#ifdef SIRDC_CLI_BINARY
TEST_CASE("installed binary reports exit codes") {
  const std::string bin = SIRDC_CLI_BINARY;
  CHECK(WEXITSTATUS(std::system((bin + " > /dev/null 2>&1").c_str())) == 1);
  CHECK(WEXITSTATUS(std::system((bin + " --help > /dev/null 2>&1").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system((bin + " fit --input /nonexistent/x.csv > /dev/null 2>&1").c_str())) == 2);
}
#endif
