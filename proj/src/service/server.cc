#include "odcube/service/server.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "httplib.h"

#include "odcube/aggregation/aggregates.h"
#include "odcube/core/error.h"
#include "odcube/ingest/csv_loader.h"
#include "odcube/ingest/snapshot_io.h"
#include "odcube/query/query_json.h"
#include "odcube/service/point_buffer.h"

namespace odcube {

using nlohmann::json;

std::filesystem::path default_data_dir() {
  if (auto const* env = std::getenv("ODCUBE_DATA_DIR"); env != nullptr && *env) {
    return env;
  }
  return std::filesystem::current_path();
}

namespace {

struct http_error : error {
  http_error(int const s, std::string const& msg) : error{msg}, status{s} {}
  int status;
};

std::pair<int, std::string_view> classify_exception(std::exception const& e) {
  if (auto const* h = dynamic_cast<http_error const*>(&e)) {
    return {h->status, "BadRequest"};
  }
  if (dynamic_cast<not_found_error const*>(&e)) {
    return {404, "NotFound"};
  }
  if (dynamic_cast<schema_error const*>(&e)) {
    return {422, "SchemaError"};
  }
  if (dynamic_cast<empty_dataset_error const*>(&e)) {
    return {422, "EmptyDataset"};
  }
  if (dynamic_cast<config_error const*>(&e)) {
    return {422, "ConfigError"};
  }
  if (dynamic_cast<parse_error const*>(&e)) {
    return {400, "ParseError"};
  }
  if (dynamic_cast<domain_error const*>(&e)) {
    return {409, "DomainError"};
  }
  if (dynamic_cast<json::exception const*>(&e)) {
    return {422, "SchemaError"};
  }
  return {500, "InternalError"};
}

void send_json(httplib::Response& res, int const status, json const& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(httplib::Request const& req) {
  if (req.body.empty()) {
    return json::object();
  }
  try {
    return json::parse(req.body);
  } catch (json::parse_error const& e) {
    throw parse_error{std::string{"malformed JSON body: "} + e.what()};
  }
}

query_id parse_id(std::string const& s) {
  try {
    std::size_t used = 0;
    auto const v = std::stoull(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument{s};
    }
    return v;
  } catch (std::exception const&) {
    throw not_found_error{"unknown query \"" + s + "\""};
  }
}

query_id id_from_json(json const& j, char const* key) {
  auto const it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw schema_error{std::string{"expected query id in \""} + key + "\""};
  }
  return it->get<query_id>();
}

// "start,end" with each part epoch seconds or a local time string.
time_interval parse_span(std::string const& s, time_zone const& zone) {
  auto const comma = s.find(',');
  if (comma == std::string::npos) {
    throw parse_error{"span must be \"start,end\""};
  }
  auto const part = [&](std::string const& p) {
    auto const numeric = !p.empty() && p.find_first_not_of("0123456789") == std::string::npos;
    return time_from_json(numeric ? json(std::stoll(p)) : json(p), zone);
  };
  return make_interval(part(s.substr(0, comma)), part(s.substr(comma + 1)));
}

void append_message(std::string& out, std::uint8_t const type,
                    std::string_view const payload) {
  auto const len = static_cast<std::uint32_t>(payload.size());
  out.push_back(static_cast<char>(type));
  for (auto i = 0; i != 4; ++i) {
    out.push_back(static_cast<char>((len >> (8 * i)) & 0xFFU));
  }
  out.append(payload);
}

struct dataset_entry {
  std::string id;
  snapshot_ptr snapshot;
  std::shared_ptr<session> sess;
  json report;
};

json dataset_metadata(dataset_entry const& d) {
  auto const& s = *d.snapshot;
  auto const& b = s.bounds();
  auto const lo = unproject({b.min_x, b.min_y});
  auto const hi = unproject({b.max_x, b.max_y});
  return {{"id", d.id},
          {"n", s.size()},
          {"interval", interval_to_json(s.interval())},
          {"bbox", {b.min_x, b.min_y, b.max_x, b.max_y}},
          {"bbox_lonlat", {lo.lon, lo.lat, hi.lon, hi.lat}},
          {"timezone", s.zone().name()},
          {"neighborhoods", d.sess->neighborhoods().size()},
          {"report", d.report}};
}

}  // namespace

struct server::impl {
  explicit impl(server_options o) : opt{std::move(o)} {}

  server_options opt;
  httplib::Server http;
  int bound_port{-1};
  std::atomic<bool> stopping{false};

  mutable std::mutex datasets_mutex;
  std::map<std::string, dataset_entry> datasets;
  std::string active;
  std::size_t next_dataset{1};

  std::string register_dataset(snapshot_ptr s, neighborhood_set regions, json report) {
    std::unique_lock lock{datasets_mutex};
    auto id = "ds" + std::to_string(next_dataset++);
    auto sess = std::make_shared<session>(s, std::move(regions));
    datasets.emplace(id, dataset_entry{id, std::move(s), std::move(sess), std::move(report)});
    active = id;
    return id;
  }

  dataset_entry dataset(std::string const& id) const {
    std::unique_lock lock{datasets_mutex};
    auto const it = datasets.find(id);
    if (it == datasets.end()) {
      throw not_found_error{"unknown dataset \"" + id + "\""};
    }
    return it->second;
  }

  dataset_entry target(httplib::Request const& req) const {
    if (req.has_param("dataset")) {
      return dataset(req.get_param_value("dataset"));
    }
    std::unique_lock lock{datasets_mutex};
    if (active.empty()) {
      throw not_found_error{"no dataset loaded"};
    }
    return datasets.at(active);
  }

  std::filesystem::path resolve(std::string const& p) const {
    std::filesystem::path path{p};
    return path.is_absolute() ? path : opt.data_dir / path;
  }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (std::exception const& e) {
      auto const [status, name] = classify_exception(e);
      send_json(res, status, {{"error", name}, {"message", e.what()}});
    }
  }

  json with_revision(json j, session const& s) const {
    j["revision"] = s.read([](query_manager const& m) { return m.revision(); });
    return j;
  }

  // ---- datasets

  void post_dataset(httplib::Request const& req, httplib::Response& res) {
    auto const body = parse_body(req);
    auto const policy = body.value("reject_policy", std::string{"drop"}) == "fail"
                            ? reject_policy::fail
                            : reject_policy::drop;
    auto const grid = body.value("grid_cells", std::size_t{0});
    snapshot_ptr snap;
    json report = json::object();

    if (body.contains("snapshot")) {
      snap = read_snapshot(resolve(body["snapshot"].get<std::string>()));
    } else {
      auto const map = body.contains("column_map")
                           ? column_map::from_json(body["column_map"])
                           : column_map::canonical();
      std::string csv;
      if (body.contains("csv")) {
        csv = body["csv"].get<std::string>();
      } else if (body.contains("path")) {
        auto const path = resolve(body["path"].get<std::string>());
        std::ifstream in{path, std::ios::binary};
        if (!in) {
          throw not_found_error{"cannot open " + path.string()};
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        csv = ss.str();
      } else {
        throw schema_error{"POST /datasets needs \"path\", \"csv\" or \"snapshot\""};
      }
      auto parsed = parse_trips(csv, map, policy);
      report = parsed.report.to_json();
      if (parsed.columns.size() == 0) {
        send_json(res, 422,
                  {{"error", "EmptyDataset"},
                   {"message", "no rows accepted"},
                   {"report", report}});
        return;
      }
      snap = std::make_shared<dataset_snapshot const>(std::move(parsed.columns),
                                                      map.timezone, grid);
    }

    neighborhood_set regions;
    if (body.contains("neighborhoods")) {
      auto loaded = load_neighborhoods(resolve(body["neighborhoods"].get<std::string>()),
                                       body.value("name_key", std::string{"name"}));
      regions = std::move(loaded.set);
      report["neighborhood_warnings"] = loaded.warnings;
    }
    auto const id = register_dataset(snap, std::move(regions), report);
    send_json(res, 201, dataset_metadata(dataset(id)));
  }

  // ---- queries

  json query_response(session& s, query_id const id) const {
    return s.read([&](query_manager const& m) {
      auto j = result_to_json(m, id);
      j["revision"] = m.revision();
      return j;
    });
  }

  void install_routes() {
    http.Get("/health", [](httplib::Request const&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    http.Get("/datasets", [this](httplib::Request const&, httplib::Response& res) {
      guarded(res, [&] {
        std::vector<std::string> ids;
        {
          std::unique_lock lock{datasets_mutex};
          for (auto const& [id, d] : datasets) {
            ids.push_back(id);
          }
        }
        auto list = json::array();
        for (auto const& id : ids) {
          list.push_back(dataset_metadata(dataset(id)));
        }
        send_json(res, 200, {{"datasets", list}, {"active", active}});
      });
    });
    http.Post("/datasets", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] { post_dataset(req, res); });
    });
    http.Get("/datasets/:id", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        send_json(res, 200, dataset_metadata(dataset(req.path_params.at("id"))));
      });
    });

    http.Get("/queries", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = d.sess->read([](query_manager const& m) {
          auto list = json::array();
          for (auto const id : m.ids()) {
            list.push_back(result_to_json(m, id));
          }
          return json{{"queries", list},
                      {"revision", m.revision()},
                      {"global_count", m.global_mask()->count()}};
        });
        send_json(res, 200, body);
      });
    });
    http.Post("/queries", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = parse_body(req);
        auto const id = d.sess->mutate([&](query_manager& m) {
          json_context const ctx{&m.snapshot(), &d.sess->neighborhoods()};
          return m.add(query_spec_from_json(body, ctx));
        });
        send_json(res, 201, query_response(*d.sess, id));
      });
    });
    http.Get("/queries/:id", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        send_json(res, 200, query_response(*d.sess, parse_id(req.path_params.at("id"))));
      });
    });
    http.Patch("/queries/:id", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = parse_body(req);
        auto const id = parse_id(req.path_params.at("id"));
        d.sess->mutate([&](query_manager& m) {
          json_context const ctx{&m.snapshot(), &d.sess->neighborhoods()};
          if (!m.contains(id)) {
            throw not_found_error{"unknown query " + std::to_string(id)};
          }
          if (body.contains("kind")) {
            m.set_kind(id, parse_event_kind(body["kind"].get<std::string>()));
          }
          if (body.contains("prism")) {
            std::optional<endpoint> which;
            if (body.contains("endpoint")) {
              auto const e = body["endpoint"].get<std::string>();
              if (e == "origin" || e == "pickup") {
                which = endpoint::pickup;
              } else if (e == "destination" || e == "dropoff") {
                which = endpoint::dropoff;
              } else {
                throw schema_error{"endpoint must be origin or destination"};
              }
            }
            m.move_prism(id, prism_from_json(body["prism"], ctx), which);
          }
          if (body.contains("recurrence")) {
            auto const& r = body["recurrence"];
            m.apply_recurrence(id, r.is_null() ? std::nullopt
                                               : std::optional{recurrence_from_json(r)});
          }
          if (body.contains("visible")) {
            m.set_visible(id, body["visible"].get<bool>());
          }
        });
        send_json(res, 200, query_response(*d.sess, id));
      });
    });
    http.Delete("/queries/:id", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const id = parse_id(req.path_params.at("id"));
        d.sess->mutate([&](query_manager& m) { m.remove(id); });
        send_json(res, 200, with_revision({{"deleted", id}}, *d.sess));
      });
    });

    http.Post("/queries/:id/link", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const origin = parse_id(req.path_params.at("id"));
        auto const dest = id_from_json(parse_body(req), "destination");
        auto const id = d.sess->mutate(
            [&](query_manager& m) { return m.link_directional(origin, dest); });
        auto j = query_response(*d.sess, id);
        j["retired"] = {origin, dest};
        send_json(res, 201, j);
      });
    });
    http.Post("/queries/:id/revert", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const id = parse_id(req.path_params.at("id"));
        auto const [a, b] =
            d.sess->mutate([&](query_manager& m) { return m.revert_directional(id); });
        send_json(res, 200,
                  with_revision({{"retired", id},
                                 {"restored",
                                  {query_response(*d.sess, a), query_response(*d.sess, b)}}},
                                *d.sess));
      });
    });
    http.Post("/queries/:id/merge", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const a = parse_id(req.path_params.at("id"));
        auto const b = id_from_json(parse_body(req), "with");
        std::vector<std::string> warnings;
        auto const id = d.sess->mutate([&](query_manager& m) {
          auto const r = m.merge(a, b);
          warnings = m.take_warnings();
          return r;
        });
        auto j = query_response(*d.sess, id);
        if (id != a) {
          j["retired"] = {a, b};
        }
        j["warnings"] = warnings;
        send_json(res, 201, j);
      });
    });
    http.Post("/queries/:id/demerge", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const id = parse_id(req.path_params.at("id"));
        auto const ids = d.sess->mutate([&](query_manager& m) { return m.demerge(id); });
        auto restored = json::array();
        for (auto const r : ids) {
          restored.push_back(query_response(*d.sess, r));
        }
        send_json(res, 200,
                  with_revision({{"retired", id}, {"restored", restored}}, *d.sess));
      });
    });
    http.Post("/queries/:id/duplicate", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const src = parse_id(req.path_params.at("id"));
        auto const id = d.sess->mutate([&](query_manager& m) { return m.duplicate(src); });
        send_json(res, 201, query_response(*d.sess, id));
      });
    });

    http.Post("/recurrence", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = parse_body(req);
        std::optional<query_id> target_id;
        if (body.contains("target") && !(body["target"].is_string() &&
                                         body["target"].get<std::string>() == "all")) {
          target_id = id_from_json(body, "target");
        }
        std::optional<recurrence_pattern> pattern;
        if (body.contains("recurrence") && !body["recurrence"].is_null()) {
          pattern = recurrence_from_json(body["recurrence"]);
        }
        auto const ids = d.sess->mutate(
            [&](query_manager& m) { return m.apply_recurrence(target_id, pattern); });
        auto list = json::array();
        for (auto const id : ids) {
          list.push_back(query_response(*d.sess, id));
        }
        send_json(res, 200, with_revision({{"queries", list}}, *d.sess));
      });
    });

    auto const get_constraints = [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        send_json(res, 200, d.sess->read([](query_manager const& m) {
          auto list = json::array();
          for (auto const& c : m.constraints()) {
            list.push_back(constraint_to_json(c));
          }
          return json{{"constraints", list},
                      {"global_count", m.global_mask()->count()},
                      {"revision", m.revision()}};
        }));
      });
    };
    auto const put_constraints = [this, get_constraints](httplib::Request const& req,
                                                          httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = parse_body(req);
        auto const& arr = body.is_array() ? body : body.at("constraints");
        std::vector<attribute_constraint> cs;
        for (auto const& c : arr) {
          cs.push_back(constraint_from_json(c));
        }
        d.sess->mutate([&](query_manager& m) { m.set_constraints(std::move(cs)); });
        get_constraints(req, res);
      });
    };
    http.Get("/constraints", get_constraints);
    http.Put("/constraints", put_constraints);
    http.Post("/constraints", put_constraints);

    http.Get("/aggregates/:what", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] { aggregate(req, res); });
    });

    http.Post("/session/brush", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const body = parse_body(req);
        if (!body.is_object() || !body.contains("seq") || !body["seq"].is_number_unsigned()) {
          throw parse_error{"brush update needs an unsigned \"seq\""};
        }
        auto const seq = body["seq"].get<std::uint64_t>();
        std::optional<brush_spec> brush;
        if (body.contains("brush") && !body["brush"].is_null()) {
          json_context const ctx{d.snapshot.get(), &d.sess->neighborhoods()};
          brush = brush_from_json(body["brush"], ctx);
        }
        auto const accepted = d.sess->submit_brush(seq, std::move(brush));
        send_json(res, 202, {{"accepted", accepted}, {"seq", seq}});
      });
    });
    http.Get("/session/state", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const f = d.sess->latest_frame();
        send_json(res, 200,
                  f ? f->control()
                    : with_revision({{"type", "idle"}, {"sequence", 0}}, *d.sess));
      });
    });
    http.Get("/session/frame", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const after = req.has_param("after")
                               ? std::stoull(req.get_param_value("after"))
                               : std::uint64_t{0};
        auto const timeout = req.has_param("timeout_ms")
                                 ? std::stoll(req.get_param_value("timeout_ms"))
                                 : std::int64_t{1000};
        auto const f = d.sess->wait_frame(after, std::chrono::milliseconds{timeout});
        if (f == nullptr) {
          res.status = 204;
          return;
        }
        res.status = 200;
        res.set_header("X-Frame-Sequence", std::to_string(f->sequence));
        res.set_header("X-Revision", std::to_string(f->revision));
        res.set_header("X-Brush-Seq", std::to_string(f->brush_seq));
        if (req.get_param_value("format") == "json") {
          res.set_content(f->control().dump(), "application/json");
        } else {
          res.set_content(f->points, "application/octet-stream");
        }
      });
    });
    http.Get("/session/stream", [this](httplib::Request const& req, httplib::Response& res) {
      guarded(res, [&] {
        auto const d = target(req);
        auto const sess = d.sess;
        auto last = req.has_param("after") ? std::stoull(req.get_param_value("after"))
                                           : std::uint64_t{0};
        auto remaining = req.has_param("max_frames")
                             ? std::stoull(req.get_param_value("max_frames"))
                             : std::uint64_t{0};
        auto const limited = remaining != 0;
        res.set_chunked_content_provider(
            "application/octet-stream",
            [this, sess, last, remaining, limited](std::size_t, httplib::DataSink& sink) mutable {
              if (stopping.load() || (limited && remaining == 0)) {
                sink.done();
                return true;
              }
              auto const f = sess->wait_frame(last, std::chrono::milliseconds{250});
              if (f == nullptr) {
                return sink.is_writable();
              }
              std::string msg;
              append_message(msg, 1, f->control().dump());
              append_message(msg, 2, f->points);
              last = f->sequence;
              if (limited) {
                --remaining;
              }
              return sink.write(msg.data(), msg.size());
            });
      });
    });
  }

  void aggregate(httplib::Request const& req, httplib::Response& res) {
    auto const d = target(req);
    auto const what = req.path_params.at("what");
    auto const& s = *d.snapshot;
    auto const param = [&](char const* k, std::string def) {
      return req.has_param(k) ? req.get_param_value(k) : def;
    };

    // Mask and default kind of the referenced query.
    std::shared_ptr<result_mask const> mask;
    auto kind = event_kind::either;
    auto revision = std::uint64_t{};
    auto const ref = param("query", "all");
    d.sess->read([&](query_manager const& m) {
      revision = m.revision();
      if (ref == "all") {
        mask = m.global_mask();
        return;
      }
      auto const id = parse_id(ref);
      mask = m.result(id).mask;
      auto const& spec = m.spec(id);
      if (spec.is_atomic()) {
        kind = std::get<atomic_query>(spec.shape).kind;
      } else if (spec.is_directional()) {
        kind = event_kind::origin;
      }
    });
    if (req.has_param("kind")) {
      kind = parse_event_kind(req.get_param_value("kind"));
    }
    auto const span =
        req.has_param("span") ? parse_span(req.get_param_value("span"), s.zone()) : s.interval();
    auto const csv = param("format", "json") == "csv";

    json j;
    std::string text;
    auto const emit = [&](auto const& result) {
      if (csv) {
        text = to_csv(result);
      } else {
        j = to_json(result);
      }
    };
    if (what == "timeseries") {
      auto const g = req.has_param("granularity")
                         ? parse_granularity(req.get_param_value("granularity"))
                         : granularity_for(span);
      auto const series =
          time_series(s, *mask, span, g, parse_measure(param("measure", "count")), kind);
      emit(series);
    } else if (what == "histogram") {
      auto const h = histogram(s, *mask, parse_attribute(param("attribute", "fare")),
                               std::stoul(param("bins", "20")));
      emit(h);
    } else if (what == "choropleth") {
      auto const c = choropleth(s, *mask, d.sess->neighborhoods(), kind);
      emit(c);
    } else if (what == "stack") {
      if (!req.has_param("neighborhood")) {
        throw schema_error{"stack needs ?neighborhood="};
      }
      auto const series = choropleth_stack(s, *mask, d.sess->neighborhoods(),
                                           req.get_param_value("neighborhood"), span, kind);
      emit(series);
    } else {
      throw not_found_error{"unknown aggregate \"" + what + "\""};
    }
    if (csv) {
      res.status = 200;
      res.set_header("X-Revision", std::to_string(revision));
      res.set_content(text, "text/csv");
      return;
    }
    j["query"] = ref;
    j["revision"] = revision;
    send_json(res, 200, j);
  }
};

server::server(server_options opt) : impl_{std::make_unique<impl>(std::move(opt))} {
  impl_->install_routes();
}

server::~server() {
  stop();
  std::unique_lock lock{impl_->datasets_mutex};
  for (auto& [id, d] : impl_->datasets) {
    d.sess->stop();
  }
}

std::string server::add_dataset(snapshot_ptr snapshot, neighborhood_set regions,
                                json report) {
  return impl_->register_dataset(std::move(snapshot), std::move(regions),
                                 std::move(report));
}

std::shared_ptr<session> server::find_session(std::string const& id) const {
  return impl_->dataset(id).sess;
}

int server::bind() {
  if (impl_->bound_port >= 0) {
    return impl_->bound_port;
  }
  auto const port = impl_->opt.port == 0
                        ? impl_->http.bind_to_any_port(impl_->opt.host)
                        : (impl_->http.bind_to_port(impl_->opt.host, impl_->opt.port)
                               ? impl_->opt.port
                               : -1);
  if (port < 0) {
    throw config_error{"cannot bind " + impl_->opt.host + ":" +
                       std::to_string(impl_->opt.port)};
  }
  impl_->bound_port = port;
  return port;
}

void server::run() {
  bind();
  impl_->http.listen_after_bind();
}

void server::stop() {
  impl_->stopping = true;
  impl_->http.stop();
}

}  // namespace odcube
