#include "sirdc/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "sirdc/csv.hpp"
#include "sirdc/error.hpp"
#include "sirdc/susceptible.hpp"

namespace sirdc {
namespace {

using Rows = std::vector<std::vector<std::string>>;

const std::unordered_map<std::string, std::string>& state_codes() {
  static const std::unordered_map<std::string, std::string> codes = {
      {"Alabama", "AL"}, {"Alaska", "AK"}, {"Arizona", "AZ"}, {"Arkansas", "AR"}, {"California", "CA"},
      {"Colorado", "CO"}, {"Connecticut", "CT"}, {"Delaware", "DE"}, {"District of Columbia", "DC"},
      {"Florida", "FL"}, {"Georgia", "GA"}, {"Hawaii", "HI"}, {"Idaho", "ID"}, {"Illinois", "IL"},
      {"Indiana", "IN"}, {"Iowa", "IA"}, {"Kansas", "KS"}, {"Kentucky", "KY"}, {"Louisiana", "LA"},
      {"Maine", "ME"}, {"Maryland", "MD"}, {"Massachusetts", "MA"}, {"Michigan", "MI"}, {"Minnesota", "MN"},
      {"Mississippi", "MS"}, {"Missouri", "MO"}, {"Montana", "MT"}, {"Nebraska", "NE"}, {"Nevada", "NV"},
      {"New Hampshire", "NH"}, {"New Jersey", "NJ"}, {"New Mexico", "NM"}, {"New York", "NY"},
      {"North Carolina", "NC"}, {"North Dakota", "ND"}, {"Ohio", "OH"}, {"Oklahoma", "OK"}, {"Oregon", "OR"},
      {"Pennsylvania", "PA"}, {"Rhode Island", "RI"}, {"South Carolina", "SC"}, {"South Dakota", "SD"},
      {"Tennessee", "TN"}, {"Texas", "TX"}, {"Utah", "UT"}, {"Vermont", "VT"}, {"Virginia", "VA"},
      {"Washington", "WA"}, {"West Virginia", "WV"}, {"Wisconsin", "WI"}, {"Wyoming", "WY"},
      {"Puerto Rico", "PR"}, {"Guam", "GU"}, {"Virgin Islands", "VI"}, {"American Samoa", "AS"},
      {"Northern Mariana Islands", "MP"}};
  return codes;
}

std::string canonical_state(const std::string& s) {
  const auto it = state_codes().find(s);
  return it == state_codes().end() ? s : it->second;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

long find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    const std::string h = lower(trim(header[k]));
    for (const char* n : names)
      if (h == lower(n)) return static_cast<long>(k);
  }
  return -1;
}

const std::string& cell(const Rows& rows, std::size_t r, long c) {
  static const std::string empty;
  const auto& row = rows[r];
  return static_cast<std::size_t>(c) < row.size() ? row[static_cast<std::size_t>(c)] : empty;
}

double number_at(const Rows& rows, std::size_t r, long c, const char* what) {
  double v = 0.0;
  if (!csv::parse_number(cell(rows, r, c), v))
    throw ParseError(std::string("non-numeric ") + what + " cell '" + cell(rows, r, c) + "'", r + 1,
                     static_cast<std::size_t>(c) + 1);
  return v;
}

std::size_t first_data_row(const Rows& rows) {
  std::size_t r = 0;
  while (r < rows.size() && rows[r].empty()) ++r;
  if (r == rows.size()) throw ParseError("missing header row", 1, 1);
  return r;
}

std::string normalize_fips(const std::string& raw) {
  std::string s = trim(raw);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    if (s.find_first_not_of('0', dot + 1) == std::string::npos) s.resize(dot);
  }
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() < 5)
    s.insert(0, 5 - s.size(), '0');
  return s;
}

// Sorts by date and rejects duplicates.
void finalize(std::vector<RegionSeries>& regions) {
  for (auto& r : regions) {
    std::vector<std::size_t> idx(r.dates.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.dates[a] < r.dates[b]; });
    auto permute = [&](std::vector<double>& v) {
      if (v.empty()) return;
      std::vector<double> out;
      for (auto k : idx) out.push_back(v[k]);
      v.swap(out);
    };
    std::vector<Date> dates;
    for (auto k : idx) dates.push_back(r.dates[k]);
    r.dates.swap(dates);
    permute(r.cumulative_confirmed);
    permute(r.cumulative_deaths);
    permute(r.positivity);
    for (std::size_t k = 1; k < r.dates.size(); ++k)
      if (r.dates[k] == r.dates[k - 1])
        throw DataError("duplicate date " + format_date(r.dates[k]) + " for region " + r.region_id);
  }
  std::sort(regions.begin(), regions.end(),
            [](const RegionSeries& a, const RegionSeries& b) { return a.region_id < b.region_id; });
}

ParseResult parse_canonical_long(std::string_view text) {
  const Rows rows = csv::parse(text);
  const std::size_t h = first_data_row(rows);
  const auto& header = rows[h];
  const long c_date = find_column(header, {"date"});
  const long c_region = find_column(header, {"region_id"});
  const long c_state = find_column(header, {"state_id"});
  const long c_pop = find_column(header, {"population"});
  const long c_conf = find_column(header, {"cum_confirmed"});
  const long c_death = find_column(header, {"cum_deaths"});
  const std::pair<long, const char*> required[] = {{c_date, "date"},          {c_region, "region_id"},
                                                   {c_state, "state_id"},     {c_pop, "population"},
                                                   {c_conf, "cum_confirmed"}, {c_death, "cum_deaths"}};
  for (const auto& [col, name] : required)
    if (col < 0) throw ParseError(std::string("malformed header: missing column '") + name + "'", h + 1, 1);

  ParseResult out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = h + 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const std::string region = trim(cell(rows, r, c_region));
    if (region.empty()) {
      out.warnings.push_back("row " + std::to_string(r + 1) + ": empty region_id skipped");
      continue;
    }
    Date d;
    if (!try_parse_date(cell(rows, r, c_date), d))
      throw ParseError("unparseable date '" + cell(rows, r, c_date) + "'", r + 1, static_cast<std::size_t>(c_date) + 1);
    const double pop = number_at(rows, r, c_pop, "population");
    const double conf = number_at(rows, r, c_conf, "cum_confirmed");
    const double death = number_at(rows, r, c_death, "cum_deaths");
    auto [it, inserted] = index.try_emplace(region, out.regions.size());
    if (inserted) {
      RegionSeries s;
      s.region_id = region;
      s.state_id = canonical_state(trim(cell(rows, r, c_state)));
      s.population = pop;
      out.regions.push_back(std::move(s));
    }
    auto& s = out.regions[it->second];
    s.dates.push_back(d);
    s.cumulative_confirmed.push_back(conf);
    s.cumulative_deaths.push_back(death);
  }
  finalize(out.regions);
  return out;
}

ParseResult parse_jhu_wide(std::string_view text, Quantity quantity) {
  const Rows rows = csv::parse(text);
  const std::size_t h = first_data_row(rows);
  const auto& header = rows[h];
  const long c_fips = find_column(header, {"FIPS"});
  const long c_state = find_column(header, {"Province_State", "Province/State"});
  const long c_pop = find_column(header, {"Population"});
  if (c_fips < 0) throw ParseError("malformed header: missing column 'FIPS'", h + 1, 1);
  if (c_state < 0) throw ParseError("malformed header: missing column 'Province_State'", h + 1, 1);

  std::vector<std::pair<long, Date>> date_cols;
  for (std::size_t k = 0; k < header.size(); ++k) {
    Date d;
    if (try_parse_date(header[k], d)) date_cols.emplace_back(static_cast<long>(k), d);
  }
  if (date_cols.empty()) throw ParseError("malformed header: no date columns", h + 1, header.size());

  ParseResult out;
  for (std::size_t r = h + 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const std::string fips = normalize_fips(cell(rows, r, c_fips));
    if (fips.empty() || fips.find_first_not_of("0123456789") != std::string::npos ||
        fips.rfind("80", 0) == 0 || fips.rfind("90", 0) == 0 || fips.size() != 5) {
      out.warnings.push_back("row " + std::to_string(r + 1) + ": unknown region '" + cell(rows, r, c_fips) +
                             "' skipped");
      continue;
    }
    RegionSeries s;
    s.region_id = fips;
    s.state_id = canonical_state(trim(cell(rows, r, c_state)));
    if (c_pop >= 0) s.population = number_at(rows, r, c_pop, "population");
    for (const auto& [col, d] : date_cols) {
      const double v = number_at(rows, r, col, quantity == Quantity::kDeaths ? "death" : "confirmed");
      s.dates.push_back(d);
      (quantity == Quantity::kDeaths ? s.cumulative_deaths : s.cumulative_confirmed).push_back(v);
    }
    (quantity == Quantity::kDeaths ? s.cumulative_confirmed : s.cumulative_deaths).assign(s.dates.size(), 0.0);
    out.regions.push_back(std::move(s));
  }
  finalize(out.regions);
  return out;
}

}  // namespace

long RegionSeries::index_of(Date d) const {
  const auto it = std::lower_bound(dates.begin(), dates.end(), d);
  if (it == dates.end() || *it != d) return -1;
  return it - dates.begin();
}

Format parse_format(std::string_view tag) {
  if (tag == "jhu-wide") return Format::kJhuWide;
  if (tag == "canonical-long") return Format::kCanonicalLong;
  throw DataError("unknown format tag '" + std::string(tag) + "'");
}

ParseResult parse_timeseries(std::string_view text, Format format, Quantity quantity) {
  return format == Format::kCanonicalLong ? parse_canonical_long(text) : parse_jhu_wide(text, quantity);
}

ParseResult merge_jhu(const ParseResult& confirmed, const ParseResult& deaths) {
  ParseResult out;
  out.warnings = confirmed.warnings;
  out.warnings.insert(out.warnings.end(), deaths.warnings.begin(), deaths.warnings.end());
  std::unordered_map<std::string, const RegionSeries*> by_id;
  for (const auto& d : deaths.regions) by_id[d.region_id] = &d;
  for (const auto& c : confirmed.regions) {
    const auto it = by_id.find(c.region_id);
    if (it == by_id.end()) {
      out.warnings.push_back("region " + c.region_id + " has confirmed cases but no death series; skipped");
      continue;
    }
    const RegionSeries& d = *it->second;
    RegionSeries m = c;
    m.population = d.population > 0.0 ? d.population : c.population;
    for (std::size_t k = 0; k < m.dates.size(); ++k) {
      const long j = d.index_of(m.dates[k]);
      m.cumulative_deaths[k] = j >= 0 ? d.cumulative_deaths[static_cast<std::size_t>(j)] : 0.0;
    }
    out.regions.push_back(std::move(m));
    by_id.erase(it);
  }
  for (const auto& [id, _] : by_id) out.warnings.push_back("region " + id + " has deaths but no confirmed series; skipped");
  return out;
}

std::map<std::string, PositivitySeries> parse_positivity(std::string_view text) {
  const Rows rows = csv::parse(text);
  const std::size_t h = first_data_row(rows);
  const auto& header = rows[h];
  const long c_date = find_column(header, {"date"});
  const long c_state = find_column(header, {"state_id", "state"});
  const long c_pos = find_column(header, {"positivity"});
  const long c_inc = find_column(header, {"positiveIncrease"});
  const long c_tot = find_column(header, {"totalTestResultsIncrease"});
  if (c_date < 0) throw ParseError("malformed header: missing column 'date'", h + 1, 1);
  if (c_state < 0) throw ParseError("malformed header: missing column 'state_id'", h + 1, 1);
  const bool ratio = c_pos < 0;
  if (ratio && (c_inc < 0 || c_tot < 0))
    throw ParseError("malformed header: need 'positivity' or 'positiveIncrease,totalTestResultsIncrease'", h + 1, 1);

  struct Obs {
    Date date;
    double value;
    bool present;
  };
  std::map<std::string, std::vector<Obs>> raw;
  for (std::size_t r = h + 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    Date d;
    if (!try_parse_date(cell(rows, r, c_date), d))
      throw ParseError("unparseable date '" + cell(rows, r, c_date) + "'", r + 1, static_cast<std::size_t>(c_date) + 1);
    const std::string state = canonical_state(trim(cell(rows, r, c_state)));
    Obs o{d, 0.0, false};
    if (ratio) {
      double pos = 0.0, tot = 0.0;
      if (csv::parse_number(cell(rows, r, c_inc), pos) && csv::parse_number(cell(rows, r, c_tot), tot) && tot > 0.0 &&
          pos >= 0.0) {
        o.value = pos / tot;
        o.present = true;
      }
    } else if (!cell(rows, r, c_pos).empty()) {
      o.value = number_at(rows, r, c_pos, "positivity");
      o.present = true;
    }
    raw[state].push_back(o);
  }

  std::map<std::string, PositivitySeries> out;
  for (auto& [state, obs] : raw) {
    std::stable_sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.date < b.date; });
    PositivitySeries s;
    s.state_id = state;
    double last = std::nan("");
    for (const auto& o : obs) {
      if (!s.dates.empty() && s.dates.back() == o.date) continue;
      if (o.present) last = o.value;
      s.dates.push_back(o.date);
      s.values.push_back(last);
    }
    // Back-fill the leading gap with the first observation.
    const auto first = std::find_if(s.values.begin(), s.values.end(), [](double v) { return !std::isnan(v); });
    if (first == s.values.end()) continue;
    std::fill(s.values.begin(), first, *first);
    if (ratio) s.values = smooth_7day(s.values);
    for (double& v : s.values) v = std::clamp(v, kPositivityFloor, 1.0);
    out.emplace(state, std::move(s));
  }
  return out;
}

RepairResult repair_monotone(std::span<const double> series) {
  RepairResult out;
  out.values.assign(series.begin(), series.end());
  for (std::size_t k = 1; k < out.values.size(); ++k) {
    if (out.values[k] < out.values[k - 1]) {
      out.values[k] = out.values[k - 1];
      ++out.repairs;
    }
  }
  return out;
}

std::vector<double> smooth_7day(std::span<const double> series) {
  std::vector<double> out(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::size_t n = std::min<std::size_t>(k + 1, 7);
    double exact = 0.0;
    for (std::size_t j = k + 1 - n; j <= k; ++j) exact += series[j];
    out[k] = exact / static_cast<double>(n);
  }
  return out;
}

int normalize_region(RegionSeries& region) {
  if (region.dates.empty()) return 0;
  RegionSeries filled = region;
  filled.dates.clear();
  filled.cumulative_confirmed.clear();
  filled.cumulative_deaths.clear();
  filled.positivity.clear();
  const bool has_pos = region.positivity.size() == region.dates.size();
  int filled_days = 0;
  for (std::size_t k = 0; k < region.dates.size(); ++k) {
    if (k > 0) {
      for (Date d = region.dates[k - 1] + std::chrono::days{1}; d < region.dates[k]; d += std::chrono::days{1}) {
        filled.dates.push_back(d);
        filled.cumulative_confirmed.push_back(filled.cumulative_confirmed.back());
        filled.cumulative_deaths.push_back(filled.cumulative_deaths.back());
        if (has_pos) filled.positivity.push_back(filled.positivity.back());
        ++filled_days;
      }
    }
    filled.dates.push_back(region.dates[k]);
    filled.cumulative_confirmed.push_back(region.cumulative_confirmed[k]);
    filled.cumulative_deaths.push_back(region.cumulative_deaths[k]);
    if (has_pos) filled.positivity.push_back(region.positivity[k]);
  }
  auto c = repair_monotone(filled.cumulative_confirmed);
  auto d = repair_monotone(filled.cumulative_deaths);
  filled.cumulative_confirmed = std::move(c.values);
  filled.cumulative_deaths = std::move(d.values);
  region = std::move(filled);
  return filled_days + c.repairs + d.repairs;
}

std::vector<std::string> join_positivity(std::vector<RegionSeries>& regions,
                                         const std::map<std::string, PositivitySeries>& positivity) {
  std::vector<std::string> warnings;
  for (auto& r : regions) {
    r.positivity.assign(r.dates.size(), 1.0);
    const auto it = positivity.find(r.state_id);
    if (it == positivity.end() || it->second.dates.empty()) {
      warnings.push_back("no positivity for state '" + r.state_id + "' (region " + r.region_id + "); using 1.0");
      continue;
    }
    const auto& ps = it->second;
    for (std::size_t k = 0; k < r.dates.size(); ++k) {
      auto pos = std::upper_bound(ps.dates.begin(), ps.dates.end(), r.dates[k]);
      const std::size_t j = pos == ps.dates.begin() ? 0 : static_cast<std::size_t>(pos - ps.dates.begin()) - 1;
      r.positivity[k] = std::clamp(ps.values[j], kPositivityFloor, 1.0);
    }
  }
  return warnings;
}

RegionSeries aggregate_state(std::span<const RegionSeries> regions, const std::string& state_id) {
  RegionSeries out;
  out.region_id = state_id;
  out.state_id = state_id;
  std::vector<const RegionSeries*> members;
  for (const auto& r : regions)
    if (r.state_id == state_id && !r.dates.empty()) members.push_back(&r);
  if (members.empty()) throw DataError("no regions for state " + state_id);

  Date lo = members.front()->dates.front(), hi = members.front()->dates.back();
  for (const auto* m : members) {
    lo = std::min(lo, m->dates.front());
    hi = std::max(hi, m->dates.back());
    out.population += m->population;
  }
  for (Date d = lo; d <= hi; d += std::chrono::days{1}) {
    double conf = 0.0, death = 0.0, pos = std::nan("");
    for (const auto* m : members) {
      if (d < m->dates.front()) continue;
      auto it = std::upper_bound(m->dates.begin(), m->dates.end(), d);
      const auto j = static_cast<std::size_t>(it - m->dates.begin()) - 1;
      conf += m->cumulative_confirmed[j];
      death += m->cumulative_deaths[j];
      if (std::isnan(pos) && m->positivity.size() == m->dates.size() && m->dates[j] == d) pos = m->positivity[j];
    }
    out.dates.push_back(d);
    out.cumulative_confirmed.push_back(conf);
    out.cumulative_deaths.push_back(death);
    out.positivity.push_back(pos);
  }
  // Days covered by no member's positivity carry the neighbouring value.
  const auto first = std::find_if(out.positivity.begin(), out.positivity.end(), [](double v) { return !std::isnan(v); });
  if (first == out.positivity.end()) {
    out.positivity.clear();
  } else {
    std::fill(out.positivity.begin(), first, *first);
    for (std::size_t k = 1; k < out.positivity.size(); ++k)
      if (std::isnan(out.positivity[k])) out.positivity[k] = out.positivity[k - 1];
  }
  return out;
}

std::string write_canonical_long(std::span<const RegionSeries> regions) {
  std::ostringstream os;
  os << "date,region_id,state_id,population,cum_confirmed,cum_deaths\n";
  std::vector<const RegionSeries*> sorted;
  for (const auto& r : regions) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->region_id < b->region_id; });
  for (const auto* r : sorted)
    for (std::size_t k = 0; k < r->size(); ++k)
      os << csv::join({format_date(r->dates[k]), r->region_id, r->state_id, csv::format_number(r->population),
                       csv::format_number(r->cumulative_confirmed[k]), csv::format_number(r->cumulative_deaths[k])})
         << '\n';
  return os.str();
}

std::string write_positivity(const std::map<std::string, PositivitySeries>& positivity) {
  std::ostringstream os;
  os << "date,state_id,positivity\n";
  for (const auto& [state, s] : positivity)
    for (std::size_t k = 0; k < s.dates.size(); ++k)
      os << csv::join({format_date(s.dates[k]), state, csv::format_number(s.values[k])}) << '\n';
  return os.str();
}

std::map<std::string, PositivitySeries> positivity_from_regions(std::span<const RegionSeries> regions) {
  std::map<std::string, PositivitySeries> out;
  for (const auto& r : regions) {
    if (r.positivity.size() != r.dates.size()) continue;
    auto& s = out[r.state_id];
    s.state_id = r.state_id;
    for (std::size_t k = 0; k < r.dates.size(); ++k) {
      auto it = std::lower_bound(s.dates.begin(), s.dates.end(), r.dates[k]);
      if (it != s.dates.end() && *it == r.dates[k]) continue;
      const auto pos = it - s.dates.begin();
      s.dates.insert(it, r.dates[k]);
      s.values.insert(s.values.begin() + pos, r.positivity[k]);
    }
  }
  return out;
}

}  // namespace sirdc
