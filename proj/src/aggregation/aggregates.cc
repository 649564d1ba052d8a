#include "odcube/aggregation/aggregates.h"

#include <algorithm>
#include <cmath>

#include "odcube/core/error.h"
#include "odcube/core/format.h"

namespace odcube {

namespace {

endpoint series_endpoint(event_kind const k) {
  return k == event_kind::destination ? endpoint::dropoff : endpoint::pickup;
}

void check_mask(dataset_snapshot const& s, result_mask const& mask) {
  if (mask.size() != s.size()) {
    throw domain_error{"mask length does not match trip count"};
  }
}

}  // namespace

measure parse_measure(std::string_view s) {
  if (s == "count") {
    return measure::count();
  }
  if (s.starts_with("mean:")) {
    return measure::mean(parse_attribute(s.substr(5)));
  }
  if (s.starts_with("mean(") && s.ends_with(")")) {
    return measure::mean(parse_attribute(s.substr(5, s.size() - 6)));
  }
  throw parse_error{"unknown measure \"" + std::string{s} + "\""};
}

std::string to_string(measure const& m) {
  return m.type == measure::kind::count
             ? std::string{"count"}
             : "mean:" + std::string{to_string(m.attr)};
}

aggregate_series time_series(dataset_snapshot const& s, result_mask const& mask,
                             time_interval const span, time_granularity const g,
                             measure const what, event_kind const kind) {
  check_mask(s, mask);
  aggregate_series out;
  out.granularity = g;
  out.what = what;
  out.kind = kind;
  out.span = span.intersect(s.interval());
  if (out.span != span) {
    out.warnings.push_back("span clipped to dataset interval");
  }
  if (out.span.empty()) {
    out.warnings.push_back("span does not overlap the dataset");
    return out;
  }
  out.bucket_starts = bucket_starts(s.zone(), out.span, g);
  auto const buckets = out.bucket_starts.size();
  std::vector<double> sums(buckets, 0.0);
  std::vector<std::size_t> counts(buckets, 0);
  auto const times = s.times(series_endpoint(kind));
  auto const values = s.attribute_column(what.attr);
  mask.for_each_set([&](std::size_t const i) {
    auto const t = times[i];
    if (!out.span.contains(t)) {
      return;
    }
    auto const b = static_cast<std::size_t>(
        std::upper_bound(begin(out.bucket_starts), end(out.bucket_starts), t) -
        begin(out.bucket_starts) - 1);
    ++counts[b];
    sums[b] += values[i];
  });
  out.values.resize(buckets);
  for (auto b = std::size_t{0}; b != buckets; ++b) {
    if (what.type == measure::kind::count) {
      out.values[b] = static_cast<double>(counts[b]);
    } else if (counts[b] != 0) {
      out.values[b] = sums[b] / static_cast<double>(counts[b]);
    }
  }
  return out;
}

histogram_result histogram(dataset_snapshot const& s, result_mask const& mask,
                           attribute const attr, std::size_t const bin_count) {
  check_mask(s, mask);
  if (bin_count == 0) {
    throw domain_error{"histogram needs at least one bin"};
  }
  histogram_result out;
  out.attr = attr;
  if (mask.none()) {
    return out;
  }
  auto const values = s.attribute_column(attr);
  auto lo = std::numeric_limits<double>::infinity();
  auto hi = -std::numeric_limits<double>::infinity();
  mask.for_each_set([&](std::size_t const i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  });
  out.min = lo;
  out.max = hi;
  out.bin_width = (hi - lo) / static_cast<double>(bin_count);
  out.counts.assign(bin_count, 0);
  mask.for_each_set([&](std::size_t const i) {
    auto bin = std::size_t{0};
    if (out.bin_width > 0.0) {
      auto const f = std::floor((values[i] - lo) / out.bin_width);
      bin = f <= 0.0 ? 0 : std::min(bin_count - 1, static_cast<std::size_t>(f));
    }
    ++out.counts[bin];
  });
  return out;
}

choropleth_table choropleth(dataset_snapshot const& s, result_mask const& mask,
                            neighborhood_set const& regions,
                            event_kind const kind) {
  check_mask(s, mask);
  choropleth_table out;
  out.kind = kind;
  std::vector<std::size_t> counts(regions.size(), 0);
  auto const e = series_endpoint(kind);
  mask.for_each_set([&](std::size_t const i) {
    if (auto const r = regions.region_of(s.position(e, i))) {
      ++counts[*r];
    } else {
      ++out.unassigned;
    }
  });
  for (auto r = std::size_t{0}; r != regions.size(); ++r) {
    out.counts.emplace_back(regions.regions()[r].name, counts[r]);
  }
  return out;
}

aggregate_series choropleth_stack(dataset_snapshot const& s,
                                  result_mask const& mask,
                                  neighborhood_set const& regions,
                                  std::string_view const name,
                                  time_interval const span,
                                  event_kind const kind) {
  check_mask(s, mask);
  auto const region = regions.index_of(name);
  auto const e = series_endpoint(kind);
  auto in_region = result_mask{s.size()};
  mask.for_each_set([&](std::size_t const i) {
    if (regions.region_of(s.position(e, i)) == region) {
      in_region.set(i);
    }
  });
  return time_series(s, in_region, span, granularity_for(span),
                     measure::count(), kind);
}

nlohmann::json to_json(aggregate_series const& a) {
  auto buckets = nlohmann::json::array();
  for (auto b = std::size_t{0}; b != a.bucket_starts.size(); ++b) {
    buckets.push_back(
        {{"bucket_start", a.bucket_starts[b]},
         {"value", a.values[b] ? nlohmann::json(*a.values[b]) : nlohmann::json(nullptr)}});
  }
  return {{"granularity", to_string(a.granularity)},
          {"measure", to_string(a.what)},
          {"kind", to_string(a.kind)},
          {"span", {a.span.start.epoch_seconds, a.span.end.epoch_seconds}},
          {"buckets", buckets},
          {"warnings", a.warnings}};
}

nlohmann::json to_json(histogram_result const& h) {
  auto bins = nlohmann::json::array();
  for (auto b = std::size_t{0}; b != h.counts.size(); ++b) {
    bins.push_back({{"bin_start", h.min + static_cast<double>(b) * h.bin_width},
                    {"value", h.counts[b]}});
  }
  return {{"attribute", to_string(h.attr)},
          {"min", h.min},
          {"max", h.max},
          {"bin_width", h.bin_width},
          {"bins", bins}};
}

nlohmann::json to_json(choropleth_table const& c) {
  auto regions = nlohmann::json::array();
  for (auto const& [name, count] : c.counts) {
    regions.push_back({{"name", name}, {"count", count}});
  }
  return {{"kind", to_string(c.kind)},
          {"regions", regions},
          {"unassigned", c.unassigned}};
}

std::string to_csv(aggregate_series const& a) {
  std::string out = "bucket_start,bucket_start_utc,value\n";
  for (auto b = std::size_t{0}; b != a.bucket_starts.size(); ++b) {
    out += std::to_string(a.bucket_starts[b]) + "," +
           format_utc(time_stamp{a.bucket_starts[b]}) + "," +
           (a.values[b] ? format_number(*a.values[b]) : std::string{}) + "\n";
  }
  return out;
}

std::string to_csv(histogram_result const& h) {
  std::string out = "bin_start,value\n";
  for (auto b = std::size_t{0}; b != h.counts.size(); ++b) {
    out += format_number(h.min + static_cast<double>(b) * h.bin_width) + "," +
           std::to_string(h.counts[b]) + "\n";
  }
  return out;
}

std::string to_csv(choropleth_table const& c) {
  std::string out = "region,value\n";
  for (auto const& [name, count] : c.counts) {
    out += name + "," + std::to_string(count) + "\n";
  }
  out += "unassigned," + std::to_string(c.unassigned) + "\n";
  return out;
}

}  // namespace odcube
