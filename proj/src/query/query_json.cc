#include "odcube/query/query_json.h"

#include <cstdio>

#include "absl/time/time.h"

#include "odcube/core/error.h"

namespace odcube {

namespace {

using nlohmann::json;

json const& require(json const& j, char const* key) {
  auto const it = j.find(key);
  if (it == j.end()) {
    throw schema_error{std::string{"missing field \""} + key + "\""};
  }
  return *it;
}

double number(json const& j, char const* what) {
  if (!j.is_number()) {
    throw schema_error{std::string{what} + " must be a number"};
  }
  return j.get<double>();
}

std::vector<plane_point> ring_from_json(json const& j, bool const lonlat) {
  if (!j.is_array()) {
    throw schema_error{"polygon must be an array of [x, y] pairs"};
  }
  std::vector<plane_point> ring;
  for (auto const& p : j) {
    if (!p.is_array() || p.size() != 2) {
      throw schema_error{"polygon vertex must be [x, y]"};
    }
    auto const a = number(p[0], "vertex coordinate");
    auto const b = number(p[1], "vertex coordinate");
    ring.push_back(lonlat ? project({a, b}) : plane_point{a, b});
  }
  return ring;
}

int minute_from_string(std::string const& s) {
  int h{}, m{};
  char tail{};
  if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 24 ||
      m < 0 || m > 59) {
    throw parse_error{"time of day must look like \"HH:MM\", got \"" + s + "\""};
  }
  return h * 60 + m;
}

std::string minute_to_string(int const minute) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minute / 60, minute % 60);
  return buf;
}

}  // namespace

std::int64_t time_from_json(json const& j, time_zone const& zone) {
  if (j.is_number_integer()) {
    return j.get<std::int64_t>();
  }
  if (!j.is_string()) {
    throw schema_error{"time must be epoch seconds or a date-time string"};
  }
  auto const s = j.get<std::string>();
  absl::Time t;
  std::string err;
  for (auto const* fmt : {"%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S",
                          "%Y-%m-%d %H:%M", "%Y-%m-%d"}) {
    if (absl::ParseTime(fmt, s, zone.absl_zone(), &t, &err)) {
      return absl::ToUnixSeconds(t);
    }
  }
  if (absl::ParseTime("%Y-%m-%dT%H:%M:%SZ", s, absl::UTCTimeZone(), &t, &err)) {
    return absl::ToUnixSeconds(t);
  }
  throw parse_error{"unparseable time \"" + s + "\""};
}

json interval_to_json(time_interval const& iv) {
  return json::array({iv.start.epoch_seconds, iv.end.epoch_seconds});
}

prism prism_from_json(json const& j, json_context const& ctx) {
  if (!j.is_object()) {
    throw schema_error{"prism must be an object"};
  }
  if (ctx.snapshot == nullptr) {
    throw schema_error{"prism JSON needs a dataset context"};
  }
  auto const& s = *ctx.snapshot;
  std::optional<polygon> footprint;
  if (auto const it = j.find("polygon"); it != j.end()) {
    footprint.emplace(ring_from_json(*it, false));
  } else if (auto const ll = j.find("polygon_lonlat"); ll != j.end()) {
    footprint.emplace(ring_from_json(*ll, true));
  } else if (auto const nb = j.find("neighborhood"); nb != j.end()) {
    if (ctx.neighborhoods == nullptr) {
      throw not_found_error{"no neighborhoods loaded"};
    }
    footprint.emplace(ctx.neighborhoods->find(nb->get<std::string>()).shape);
  }
  auto interval = s.interval();
  if (auto const it = j.find("interval"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) {
      throw schema_error{"interval must be [start, end]"};
    }
    interval = make_interval(time_from_json((*it)[0], s.zone()),
                             time_from_json((*it)[1], s.zone()));
  }
  return prism{footprint ? std::move(*footprint) : s.full_footprint(), interval};
}

json prism_to_json(prism const& p) {
  auto ring = json::array();
  for (auto const& v : p.footprint.ring()) {
    ring.push_back({v.x, v.y});
  }
  return {{"polygon", ring}, {"interval", interval_to_json(p.interval)}};
}

recurrence_pattern recurrence_from_json(json const& j) {
  if (!j.is_object()) {
    throw schema_error{"recurrence must be an object"};
  }
  recurrence_pattern r;
  if (auto const it = j.find("weekdays"); it != j.end()) {
    if (!it->is_array()) {
      throw schema_error{"weekdays must be an array"};
    }
    for (auto const& d : *it) {
      r.weekdays |= weekday_bit(parse_weekday(d.get<std::string>()));
    }
  }
  if (auto const it = j.find("hour_range"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2) {
      throw schema_error{"hour_range must be [start_minute, end_minute]"};
    }
    r.hours = minute_range{(*it)[0].get<int>(), (*it)[1].get<int>()};
  } else if (auto const h = j.find("hours"); h != j.end() && !h->is_null()) {
    if (!h->is_array() || h->size() != 2) {
      throw schema_error{"hours must be [\"HH:MM\", \"HH:MM\"]"};
    }
    r.hours = minute_range{minute_from_string((*h)[0].get<std::string>()),
                           minute_from_string((*h)[1].get<std::string>())};
  }
  r.timezone = j.value("timezone", std::string{});
  r.validate();
  return r;
}

json recurrence_to_json(recurrence_pattern const& r) {
  auto days = json::array();
  for (auto d = 0; d != 7; ++d) {
    if ((r.weekdays & weekday_bit(d)) != 0) {
      days.push_back(weekday_name(d));
    }
  }
  auto j = json{{"weekdays", days}, {"timezone", r.timezone}};
  if (r.hours) {
    j["hour_range"] = {r.hours->start, r.hours->end};
    j["hours"] = {minute_to_string(r.hours->start), minute_to_string(r.hours->end)};
  } else {
    j["hour_range"] = nullptr;
  }
  return j;
}

query_spec query_spec_from_json(json const& j, json_context const& ctx) {
  if (!j.is_object()) {
    throw schema_error{"query must be an object"};
  }
  auto const variant = j.value("variant", std::string{"atomic"});
  query_spec q{j.value("id", query_id{0}),
               atomic_query{ctx.snapshot->full_prism(), event_kind::either},
               std::nullopt, j.value("color", 0), j.value("visible", true)};
  if (variant == "atomic") {
    auto const kind = parse_event_kind(j.value("kind", std::string{"either"}));
    q.shape = atomic_query{j.contains("prism") ? prism_from_json(j["prism"], ctx)
                                               : ctx.snapshot->full_prism(),
                           kind};
  } else if (variant == "directional") {
    q.shape = directional_query{prism_from_json(require(j, "origin_prism"), ctx),
                                prism_from_json(require(j, "destination_prism"), ctx),
                                {}};
  } else if (variant == "merged") {
    merged_query m;
    for (auto const& member : require(j, "members")) {
      auto spec = query_spec_from_json(member, ctx);
      if (spec.is_merged()) {
        throw domain_error{"merged queries cannot be nested"};
      }
      m.members.push_back(std::move(spec));
    }
    if (m.members.empty()) {
      throw schema_error{"merged query needs members"};
    }
    q.shape = std::move(m);
  } else {
    throw schema_error{"unknown query variant \"" + variant + "\""};
  }
  if (auto const r = j.find("recurrence"); r != j.end() && !r->is_null()) {
    q.recurrence = recurrence_from_json(*r);
  }
  return q;
}

json query_spec_to_json(query_spec const& q) {
  json j{{"id", q.id},
         {"variant", q.variant_name()},
         {"color", q.color},
         {"visible", q.visible},
         {"recurrence",
          q.recurrence ? recurrence_to_json(*q.recurrence) : json(nullptr)}};
  std::visit(
      [&](auto const& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, atomic_query>) {
          j["prism"] = prism_to_json(shape.volume);
          j["kind"] = to_string(shape.kind);
          j["kind_color"] = kind_color(shape.kind);
        } else if constexpr (std::is_same_v<T, directional_query>) {
          j["origin_prism"] = prism_to_json(shape.origin);
          j["destination_prism"] = prism_to_json(shape.destination);
          auto sources = json::array();
          for (auto const& s : shape.sources) {
            sources.push_back(s.id);
          }
          j["source_ids"] = sources;
        } else {
          auto members = json::array();
          for (auto const& m : shape.members) {
            members.push_back(query_spec_to_json(m));
          }
          j["members"] = members;
        }
      },
      q.shape);
  return j;
}

attribute_constraint constraint_from_json(json const& j) {
  if (!j.is_object()) {
    throw schema_error{"constraint must be an object"};
  }
  attribute_constraint c;
  c.attr = parse_attribute(require(j, "attribute").get<std::string>());
  if (auto const it = j.find("min"); it != j.end() && !it->is_null()) {
    c.min = number(*it, "min");
  }
  if (auto const it = j.find("max"); it != j.end() && !it->is_null()) {
    c.max = number(*it, "max");
  }
  c.validate();
  return c;
}

json constraint_to_json(attribute_constraint const& c) {
  return {{"attribute", to_string(c.attr)},
          {"min", c.min ? json(*c.min) : json(nullptr)},
          {"max", c.max ? json(*c.max) : json(nullptr)}};
}

brush_spec brush_from_json(json const& j, json_context const& ctx) {
  if (!j.is_object()) {
    throw schema_error{"brush must be an object"};
  }
  brush_spec b;
  if (auto const it = j.find("origin"); it != j.end() && !it->is_null()) {
    b.origin_volume = prism_from_json(*it, ctx);
  }
  if (auto const it = j.find("destination"); it != j.end() && !it->is_null()) {
    b.destination_volume = prism_from_json(*it, ctx);
  }
  if (auto const it = j.find("kind"); it != j.end() && !it->is_null()) {
    b.single_kind = parse_event_kind(it->get<std::string>());
  }
  b.validate();
  return b;
}

json stats_to_json(trip_stats const& s) {
  json attrs = json::object();
  for (auto const a : kAllAttributes) {
    if (auto const& v = s.of(a)) {
      attrs[std::string{to_string(a)}] = {{"mean", v->mean}, {"min", v->min},
                                          {"max", v->max}};
    }
  }
  return {{"count", s.count}, {"attributes", attrs}};
}

json slices_to_json(std::vector<prism_slices> const& slices) {
  auto out = json::array();
  for (auto const& p : slices) {
    auto list = json::array();
    for (auto const& iv : p.slices) {
      list.push_back(interval_to_json(iv));
    }
    out.push_back({{"role", p.role},
                   {"interval", interval_to_json(p.interval)},
                   {"slices", list}});
  }
  return out;
}

json result_to_json(query_manager const& m, query_id const id) {
  auto const& r = m.result(id);
  auto j = query_spec_to_json(m.spec(id));
  j["count"] = r.stats.count;
  j["stats"] = stats_to_json(r.stats);
  j["slices"] = slices_to_json(r.slices);
  return j;
}

}  // namespace odcube
