#include "odcube/ingest/csv_loader.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/time/time.h"

#include "odcube/core/error.h"

namespace odcube {

namespace {

constexpr auto kDefaultTimeFormat = "%Y-%m-%d %H:%M:%S";

enum field_idx : std::size_t {
  kPickupTime,
  kDropoffTime,
  kPickupLon,
  kPickupLat,
  kDropoffLon,
  kDropoffLat,
  kDistance,
  kFare,
  kPassengers,
  kDuration,
  kFieldCount
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) {
    return std::nullopt;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
  }
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool parse_int(std::string_view s, int& out) {
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

class time_parser {
public:
  time_parser(std::string format, time_zone zone)
      : format_{std::move(format)}, zone_{std::move(zone)} {}

  std::optional<std::int64_t> operator()(std::string_view s) const {
    s = trim(s);
    if (format_ == "epoch") {
      std::int64_t v{};
      auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
      }
      return v;
    }
    if (format_ == kDefaultTimeFormat) {
      return parse_default(s);
    }
    absl::Time t;
    std::string err;
    if (!absl::ParseTime(format_, std::string{s}, zone_.absl_zone(), &t, &err)) {
      return std::nullopt;
    }
    return absl::ToUnixSeconds(t);
  }

private:
  // "YYYY-MM-DD hh:mm:ss"
  std::optional<std::int64_t> parse_default(std::string_view s) const {
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' ||
        (s[10] != ' ' && s[10] != 'T') || s[13] != ':' || s[16] != ':') {
      return std::nullopt;
    }
    int y{}, mo{}, d{}, h{}, mi{}, se{};
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
        !parse_int(s.substr(8, 2), d) || !parse_int(s.substr(11, 2), h) ||
        !parse_int(s.substr(14, 2), mi) || !parse_int(s.substr(17, 2), se)) {
      return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) {
      return std::nullopt;
    }
    auto const cs = absl::CivilSecond{y, mo, d, h, mi, se};
    if (cs.day() != d) {  // e.g. Feb 30 normalised into March
      return std::nullopt;
    }
    return zone_.from_civil(cs);
  }

  std::string format_;
  time_zone zone_;
};

std::vector<std::string> const kCanonicalFields = {
    "pickup_time", "dropoff_time", "pickup_lon", "pickup_lat", "dropoff_lon",
    "dropoff_lat", "distance",     "fare",       "passengers", "duration_s"};

}  // namespace

std::vector<std::string> const& canonical_fields() { return kCanonicalFields; }

column_map column_map::canonical() {
  column_map m;
  for (auto i = std::size_t{0}; i != kDuration; ++i) {
    m.fields[kCanonicalFields[i]] = kCanonicalFields[i];
  }
  return m;
}

column_map column_map::from_json(nlohmann::json const& j) {
  if (!j.is_object()) {
    throw schema_error{"column map must be a JSON object"};
  }
  column_map m;
  auto const fields = j.find("fields");
  if (fields == j.end() || !fields->is_object()) {
    throw schema_error{"column map needs a \"fields\" object"};
  }
  for (auto const& [key, value] : fields->items()) {
    if (std::find(begin(kCanonicalFields), end(kCanonicalFields), key) ==
        end(kCanonicalFields)) {
      throw schema_error{"unknown canonical field \"" + key + "\""};
    }
    if (!value.is_string()) {
      throw schema_error{"column name for \"" + key + "\" must be a string"};
    }
    m.fields[key] = value.get<std::string>();
  }
  for (auto i = std::size_t{0}; i != kDuration; ++i) {
    if (!m.fields.contains(kCanonicalFields[i])) {
      throw schema_error{"column map lacks canonical field \"" +
                         kCanonicalFields[i] + "\""};
    }
  }
  m.time_format = j.value("time_format", m.time_format);
  m.timezone = j.value("timezone", m.timezone);
  if (auto const d = j.value("delimiter", std::string{","}); d.size() == 1) {
    m.delimiter = d[0];
  } else {
    throw schema_error{"delimiter must be a single character"};
  }
  if (auto const b = j.find("city_bounds"); b != j.end()) {
    if (b->is_null()) {
      m.city_bounds.reset();
    } else if (b->is_array() && b->size() == 4) {
      m.city_bounds = geo_bounds{(*b)[0].get<double>(), (*b)[1].get<double>(),
                                 (*b)[2].get<double>(), (*b)[3].get<double>()};
    } else {
      throw schema_error{"city_bounds must be [min_lon, min_lat, max_lon, max_lat] or null"};
    }
  }
  time_zone::load(m.timezone);  // config_error early
  return m;
}

nlohmann::json column_map::to_json() const {
  auto j = nlohmann::json{{"fields", fields},
                          {"time_format", time_format},
                          {"timezone", timezone},
                          {"delimiter", std::string(1, delimiter)}};
  if (city_bounds) {
    j["city_bounds"] = {city_bounds->min_lon, city_bounds->min_lat,
                        city_bounds->max_lon, city_bounds->max_lat};
  } else {
    j["city_bounds"] = nullptr;
  }
  return j;
}

nlohmann::json ingest_report::to_json() const {
  auto reasons_json = nlohmann::json::array();
  for (auto const& r : reasons) {
    reasons_json.push_back({{"row", r.row}, {"reason", r.reason}});
  }
  return {{"accepted", accepted}, {"rejected", rejected}, {"reasons", reasons_json}};
}

std::vector<std::string_view> split_csv_line(std::string_view const line,
                                             char const delim,
                                             std::string& scratch) {
  std::vector<std::string_view> cells;
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      auto const pos = line.find(delim, start);
      if (pos == std::string_view::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    return cells;
  }
  // Slow path: unquote into scratch, then slice.
  scratch.clear();
  scratch.reserve(line.size());
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  auto in_quotes = false;
  auto cell_start = std::size_t{0};
  for (auto i = std::size_t{0}; i < line.size(); ++i) {
    auto const c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        scratch.push_back('"');
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        scratch.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == delim) {
      ranges.emplace_back(cell_start, scratch.size());
      cell_start = scratch.size();
    } else {
      scratch.push_back(c);
    }
  }
  ranges.emplace_back(cell_start, scratch.size());
  for (auto const& [b, e] : ranges) {
    cells.emplace_back(scratch.data() + b, e - b);
  }
  return cells;
}

parsed_trips parse_trips(std::string_view csv, column_map const& map,
                         reject_policy const policy) {
  auto const zone = time_zone::load(map.timezone);
  auto const parse_time = time_parser{map.time_format, zone};

  auto next_line = [&csv](std::string_view& line) {
    if (csv.empty()) {
      return false;
    }
    auto const nl = csv.find('\n');
    line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    return true;
  };

  std::string_view line;
  std::string scratch;
  if (!next_line(line)) {
    throw schema_error{"CSV has no header row"};
  }
  if (line.starts_with("\xEF\xBB\xBF")) {
    line.remove_prefix(3);
  }
  std::vector<std::string> header;
  for (auto const cell : split_csv_line(line, map.delimiter, scratch)) {
    header.emplace_back(trim(cell));
  }

  std::array<std::optional<std::size_t>, kFieldCount> col;
  for (auto f = std::size_t{0}; f != kFieldCount; ++f) {
    auto const it = map.fields.find(kCanonicalFields[f]);
    if (it == map.fields.end()) {
      if (f == kDuration) {
        continue;
      }
      throw schema_error{"column map lacks canonical field \"" +
                         kCanonicalFields[f] + "\""};
    }
    auto const h = std::find(begin(header), end(header), it->second);
    if (h == end(header)) {
      throw schema_error{"mapped column \"" + it->second + "\" (for " +
                         kCanonicalFields[f] + ") not in CSV header"};
    }
    col[f] = static_cast<std::size_t>(h - begin(header));
  }

  parsed_trips out;
  auto row = std::size_t{0};
  auto reject = [&](std::string reason) {
    if (policy == reject_policy::fail) {
      throw parse_error{"row " + std::to_string(row) + ": " + reason};
    }
    ++out.report.rejected;
    out.report.reasons.push_back({row, std::move(reason)});
  };

  while (next_line(line)) {
    if (trim(line).empty()) {
      continue;
    }
    ++row;
    auto const cells = split_csv_line(line, map.delimiter, scratch);
    if (cells.size() < header.size()) {
      reject("wrong field count");
      continue;
    }
    auto const cell = [&](field_idx const f) { return cells[*col[f]]; };

    auto const pickup_t = parse_time(cell(kPickupTime));
    auto const dropoff_t = parse_time(cell(kDropoffTime));
    if (!pickup_t || !dropoff_t || !time_stamp{*pickup_t}.valid() ||
        !time_stamp{*dropoff_t}.valid()) {
      reject("unparseable time");
      continue;
    }
    if (*dropoff_t < *pickup_t) {
      reject("dropoff before pickup");
      continue;
    }

    std::array<std::optional<double>, kFieldCount> num;
    auto bad_number = false;
    for (auto const f : {kPickupLon, kPickupLat, kDropoffLon, kDropoffLat,
                         kDistance, kFare, kPassengers}) {
      num[f] = parse_double(cell(f));
      bad_number = bad_number || !num[f];
    }
    if (col[kDuration]) {
      num[kDuration] = parse_double(cell(kDuration));
      bad_number = bad_number || !num[kDuration];
    } else {
      num[kDuration] = static_cast<double>(*dropoff_t - *pickup_t);
    }
    if (bad_number) {
      reject("unparseable number");
      continue;
    }

    auto const pickup = geo_point{*num[kPickupLon], *num[kPickupLat]};
    auto const dropoff = geo_point{*num[kDropoffLon], *num[kDropoffLat]};
    if (!pickup.valid() || !dropoff.valid()) {
      reject("invalid coordinate");
      continue;
    }
    if (map.city_bounds &&
        (!map.city_bounds->contains(pickup) || !map.city_bounds->contains(dropoff))) {
      reject("coordinate out of city bounds");
      continue;
    }
    if (*num[kDistance] < 0 || *num[kFare] < 0 || *num[kPassengers] < 0 ||
        *num[kDuration] < 0) {
      reject("negative attribute");
      continue;
    }

    out.columns.push_back({{*pickup_t},
                           {*dropoff_t},
                           project(pickup),
                           project(dropoff),
                           *num[kDuration],
                           *num[kDistance],
                           *num[kFare],
                           *num[kPassengers]});
    ++out.report.accepted;
  }
  return out;
}

ingest_result load_trips_from_string(std::string_view const csv,
                                     column_map const& map,
                                     reject_policy const policy,
                                     std::size_t const grid_target_cells) {
  auto parsed = parse_trips(csv, map, policy);
  if (parsed.report.accepted == 0) {
    throw empty_dataset_error{"no trip rows accepted (" +
                              std::to_string(parsed.report.rejected) +
                              " rejected)"};
  }
  auto snapshot = std::make_shared<dataset_snapshot const>(
      std::move(parsed.columns), map.timezone, grid_target_cells);
  return {std::move(snapshot), std::move(parsed.report)};
}

ingest_result load_trips(std::filesystem::path const& path, column_map const& map,
                         reject_policy const policy,
                         std::size_t const grid_target_cells) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw error{"cannot open " + path.string()};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_trips_from_string(buf.str(), map, policy, grid_target_cells);
}

}  // namespace odcube
