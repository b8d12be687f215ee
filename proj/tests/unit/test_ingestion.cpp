#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sirdc/csv.hpp"
#include "sirdc/error.hpp"
#include "sirdc/ingestion.hpp"

using namespace sirdc;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(SIRDC_TEST_DATA) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("canonical-long fixture") {
  const auto r = parse_timeseries(fixture("canonical_2x3.csv"), Format::kCanonicalLong);
  REQUIRE(r.regions.size() == 2);
  CHECK(r.regions[0].region_id == "01001");
  CHECK(r.regions[0].size() == 3);
  CHECK(r.regions[1].size() == 3);
  CHECK(r.regions[1].population == 223234);
  CHECK(r.regions[0].index_of(make_date(2020, 3, 22)) == 1);
  CHECK(r.regions[0].index_of(make_date(2020, 3, 25)) == -1);
}

TEST_CASE("non-numeric cell names row and column") {
  try {
    parse_timeseries(fixture("canonical_bad_death.csv"), Format::kCanonicalLong);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == 6);
  }
  // Row 4 of the file when the bad cell sits there.
  const std::string text =
      "date,region_id,state_id,population,cum_confirmed,cum_deaths\n"
      "2020-03-21,1,AL,10,1,0\n2020-03-22,1,AL,10,1,0\n2020-03-23,1,AL,10,1,bad\n";
  try {
    parse_timeseries(text, Format::kCanonicalLong);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
    CHECK(std::string(e.what()).find("row 4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_timeseries("date,region_id\n", Format::kCanonicalLong), ParseError);
  CHECK_THROWS_AS(parse_timeseries("date,region_id,state_id,population,cum_confirmed,cum_deaths\nnot-a-date,1,A,1,1,1\n",
                                   Format::kCanonicalLong),
                  ParseError);
}

TEST_CASE("jhu-wide with one date column") {
  const auto conf = parse_timeseries(fixture("jhu_confirmed.csv"), Format::kJhuWide, Quantity::kConfirmed);
  const auto deaths = parse_timeseries(fixture("jhu_deaths.csv"), Format::kJhuWide, Quantity::kDeaths);
  REQUIRE(conf.regions.size() == 1);
  CHECK(conf.warnings.size() == 2);
  const auto merged = merge_jhu(conf, deaths);
  REQUIRE(merged.regions.size() == 1);
  const auto& r = merged.regions[0];
  CHECK(r.region_id == "01001");
  CHECK(r.state_id == "AL");
  CHECK(r.population == 55869);
  CHECK(r.size() == 1);
  CHECK(r.cumulative_confirmed[0] == 7);
  CHECK(r.cumulative_deaths[0] == 1);
}

TEST_CASE("format tags") {
  CHECK(parse_format("jhu-wide") == Format::kJhuWide);
  CHECK(parse_format("canonical-long") == Format::kCanonicalLong);
  CHECK_THROWS_AS(parse_format("xlsx"), DataError);
}

TEST_CASE("repair_monotone") {
  const std::vector<double> v{5, 7, 6, 9};
  auto r = repair_monotone(v);
  CHECK(r.values == std::vector<double>{5, 7, 7, 9});
  CHECK(r.repairs == 1);
  CHECK(repair_monotone(r.values).values == r.values);
  CHECK(repair_monotone(r.values).repairs == 0);
  const std::vector<double> flat(4, 3.0);
  CHECK(repair_monotone(flat).values == flat);
  CHECK(repair_monotone(flat).repairs == 0);
}

TEST_CASE("smooth_7day") {
  const std::vector<double> c(10, 2.5);
  CHECK(smooth_7day(c) == c);
  const std::vector<double> one{4.0};
  CHECK(smooth_7day(one) == one);
  const std::vector<double> tail{0, 0, 0, 0, 0, 0, 7};
  CHECK(smooth_7day(tail).back() == 1.0);
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
  const auto s = smooth_7day(v);
  REQUIRE(s.size() == v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t lo = k >= 6 ? k - 6 : 0;
    const auto [mn, mx] = std::minmax_element(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(k) + 1);
    CHECK(s[k] >= *mn);
    CHECK(s[k] <= *mx);
  }
}

TEST_CASE("normalize fills gaps and repairs") {
  RegionSeries r;
  r.region_id = "1";
  r.dates = {make_date(2020, 3, 21), make_date(2020, 3, 24)};
  r.cumulative_confirmed = {5, 4};
  r.cumulative_deaths = {0, 2};
  CHECK(normalize_region(r) == 3);
  REQUIRE(r.size() == 4);
  CHECK(r.cumulative_confirmed == std::vector<double>{5, 5, 5, 5});
  CHECK(r.cumulative_deaths == std::vector<double>{0, 0, 0, 2});
}

TEST_CASE("positivity: tracking style, join with edge fill, missing state") {
  const auto pos = parse_positivity(fixture("tracking_positivity.csv"));
  REQUIRE(pos.count("AL") == 1);
  const auto& al = pos.at("AL");
  REQUIRE(al.values.size() == 3);
  CHECK(al.values[0] == doctest::Approx(0.1));
  CHECK(al.values[1] == doctest::Approx(0.15));
  CHECK(al.values[2] == doctest::Approx(0.2));

  auto regions = parse_timeseries(fixture("canonical_2x3.csv"), Format::kCanonicalLong).regions;
  RegionSeries other = regions[0];
  other.region_id = "06001";
  other.state_id = "CA";
  regions.push_back(other);
  regions[0].dates.push_back(make_date(2020, 3, 24));
  regions[0].cumulative_confirmed.push_back(12);
  regions[0].cumulative_deaths.push_back(1);
  const auto warnings = join_positivity(regions, pos);
  CHECK(warnings.size() == 1);
  CHECK(regions[0].positivity.back() == doctest::Approx(0.2));
  CHECK(regions[2].positivity == std::vector<double>(3, 1.0));

  const auto clamped = parse_positivity("date,state_id,positivity\n2020-03-21,AL,0\n2020-03-22,AL,1.4\n");
  CHECK(clamped.at("AL").values == std::vector<double>{0.01, 1.0});
}

TEST_CASE("state aggregation sums counties") {
  auto regions = parse_timeseries(fixture("canonical_2x3.csv"), Format::kCanonicalLong).regions;
  for (auto& r : regions) normalize_region(r);
  const auto s = aggregate_state(regions, "AL");
  CHECK(s.population == 55869 + 223234);
  CHECK(s.cumulative_confirmed == std::vector<double>{16, 22, 25});
  CHECK(s.cumulative_deaths == std::vector<double>{0, 1, 2});
  CHECK_THROWS_AS(aggregate_state(regions, "ZZ"), DataError);
}

TEST_CASE("canonical-long round trip") {
  const auto first = parse_timeseries(fixture("canonical_2x3.csv"), Format::kCanonicalLong);
  const auto again = parse_timeseries(write_canonical_long(first.regions), Format::kCanonicalLong);
  REQUIRE(again.regions.size() == first.regions.size());
  for (std::size_t k = 0; k < first.regions.size(); ++k) {
    const auto& a = first.regions[k];
    const auto& b = again.regions[k];
    CHECK(a.dates == b.dates);
    CHECK(a.state_id == b.state_id);
    for (std::size_t t = 0; t < a.size(); ++t) {
      CHECK(std::abs(a.cumulative_confirmed[t] - b.cumulative_confirmed[t]) <= 1e-9);
      CHECK(std::abs(a.cumulative_deaths[t] - b.cumulative_deaths[t]) <= 1e-9);
    }
  }
}

TEST_CASE("csv helpers") {
  const auto rows = csv::parse("\xEF\xBB\xBF" "a,\"b,c\",\"d\"\"e\"\r\n1,2,3\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "a");
  CHECK(rows[0][1] == "b,c");
  CHECK(rows[0][2] == "d\"e");
  CHECK(csv::format_number(0.0) == "0");
  CHECK(csv::format_number(3.0) == "3");
  CHECK(csv::format_number(0.1) == "0.1");
  double v = 0;
  CHECK(csv::parse_number(" 2.5 ", v));
  CHECK(v == 2.5);
  CHECK_FALSE(csv::parse_number("", v));
  CHECK_FALSE(csv::parse_number("2x", v));
}
