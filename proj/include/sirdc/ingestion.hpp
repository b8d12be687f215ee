#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sirdc/date.hpp"

namespace sirdc {

/// Observed daily series for one region on a gap-free daily grid.
struct RegionSeries {
  std::string region_id;  ///< FIPS-style identifier
  std::string state_id;
  double population = 0.0;
  std::vector<Date> dates;
  std::vector<double> cumulative_confirmed;
  std::vector<double> cumulative_deaths;
  std::vector<double> positivity;  ///< state-level, joined by state_id; may be empty before the join

  std::size_t size() const { return dates.size(); }
  /// Index of `d` in `dates`, or -1.
  long index_of(Date d) const;
};

/// State-level test positivity on its own daily grid.
struct PositivitySeries {
  std::string state_id;
  std::vector<Date> dates;
  std::vector<double> values;
};

enum class Format {
  kJhuWide,       ///< metadata columns then one column per date
  kCanonicalLong  ///< date,region_id,state_id,population,cum_confirmed,cum_deaths
};

/// Which quantity a jhu-wide file carries.
enum class Quantity { kConfirmed, kDeaths };

Format parse_format(std::string_view tag);

struct ParseResult {
  std::vector<RegionSeries> regions;  ///< sorted by region_id
  std::vector<std::string> warnings;
};

/// Parses one time-series file. For jhu-wide the file carries a single
/// quantity; merge a confirmed and a deaths file with merge_jhu.
/// Throws ParseError with row/column coordinates on malformed input.
ParseResult parse_timeseries(std::string_view text, Format format, Quantity quantity = Quantity::kConfirmed);

/// Joins jhu-wide confirmed and deaths parses by region_id. Regions missing
/// from either side are dropped with a warning.
ParseResult merge_jhu(const ParseResult& confirmed, const ParseResult& deaths);

/// Reads `date,state_id,positivity` or tracking-project style
/// `date,state,positiveIncrease,totalTestResultsIncrease` (daily ratio,
/// 7-day smoothed). Values are clamped to [kPositivityFloor, 1].
std::map<std::string, PositivitySeries> parse_positivity(std::string_view text);

struct RepairResult {
  std::vector<double> values;
  int repairs = 0;
};

/// Running maximum: negative daily increments become zero.
RepairResult repair_monotone(std::span<const double> series);

/// Trailing 7-day mean; the first six days average the available prefix.
std::vector<double> smooth_7day(std::span<const double> series);

/// Inserts missing dates, carrying cumulative values forward, then repairs
/// both cumulative series. Returns the number of repaired entries.
int normalize_region(RegionSeries& region);

/// Fills `positivity` of every region from its state's series, forward/back
/// filling outside the observed span. Regions whose state has no positivity
/// get 1.0 and a warning.
std::vector<std::string> join_positivity(std::vector<RegionSeries>& regions,
                                         const std::map<std::string, PositivitySeries>& positivity);

/// Sums confirmed, deaths and population over the regions of one state on
/// the union date grid. Positivity is taken from the first region (all share
/// the state series).
RegionSeries aggregate_state(std::span<const RegionSeries> regions, const std::string& state_id);

/// Canonical-long rendering (one row per region and date, sorted).
std::string write_canonical_long(std::span<const RegionSeries> regions);

/// `date,state_id,positivity` rendering.
std::string write_positivity(const std::map<std::string, PositivitySeries>& positivity);

/// Positivity series implied by already-joined regions.
std::map<std::string, PositivitySeries> positivity_from_regions(std::span<const RegionSeries> regions);

}  // namespace sirdc
