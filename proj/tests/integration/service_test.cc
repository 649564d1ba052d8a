#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "odcube/core/error.h"
#include "odcube/query/query_json.h"
#include "odcube/service/point_buffer.h"
#include "odcube/service/server.h"
#include "odcube/service/session.h"
#include "odcube/synth/synthetic.h"

#include "fixtures.h"
#include "oracle.h"
#include "random_cases.h"

using namespace odcube;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

float read_f32(std::string_view const b, std::size_t const off) {
  float v;
  std::memcpy(&v, b.data() + off, 4);
  return v;
}

// Independent reading of the wire format.
struct raw_point {
  float x, y, t;
  std::uint8_t status, color;
};

std::vector<raw_point> parse_raw(std::string_view const b, std::uint64_t& revision,
                                 std::uint32_t& n, std::uint32_t& flags) {
  std::memcpy(&revision, b.data(), 8);
  std::memcpy(&n, b.data() + 8, 4);
  std::memcpy(&flags, b.data() + 12, 4);
  std::vector<raw_point> out;
  for (std::size_t i = 0; i != 2 * std::size_t{n}; ++i) {
    auto const off = 16 + 14 * i;
    out.push_back({read_f32(b, off), read_f32(b, off + 4), read_f32(b, off + 8),
                   static_cast<std::uint8_t>(b[off + 12]),
                   static_cast<std::uint8_t>(b[off + 13])});
  }
  return out;
}

struct running_server {
  explicit running_server(snapshot_ptr s, neighborhood_set regions = {},
                          std::filesystem::path data_dir = fixture::temp_dir("server-data"))
      : srv{server_options{"127.0.0.1", 0, std::move(data_dir)}} {
    if (s) {
      id = srv.add_dataset(std::move(s), std::move(regions));
    }
    port = srv.bind();
    thread = std::thread{[this] { srv.run(); }};
    cli = std::make_unique<httplib::Client>("127.0.0.1", port);
    cli->set_read_timeout(10, 0);
  }
  ~running_server() {
    srv.stop();
    thread.join();
  }

  json get(std::string const& path, int const expect = 200) {
    auto const r = cli->Get(path);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == expect, path << ": " << r->body);
    return r->body.empty() ? json{} : json::parse(r->body);
  }
  json post(std::string const& path, json const& body, int const expect) {
    auto const r = cli->Post(path, body.dump(), "application/json");
    REQUIRE(r);
    CHECK_MESSAGE(r->status == expect, path << ": " << r->body);
    return json::parse(r->body);
  }

  server srv;
  std::string id;
  int port{};
  std::thread thread;
  std::unique_ptr<httplib::Client> cli;
};

}  // namespace

TEST_CASE("point buffer: layout, round trip, normalization") {
  gen::rng r{1};
  auto const s = gen::random_snapshot(r, 700);
  auto const global = gen::random_mask(r, s->size(), 0.9);
  std::vector<result_mask> const qs{gen::random_mask(r, s->size(), 0.3),
                                    gen::random_mask(r, s->size(), 0.3)};
  auto const brush = gen::random_mask(r, s->size(), 0.1);
  auto const status = classify(*s, global, qs, &brush);
  std::vector<colored_mask> const colored{{&qs[0], 4}, {&qs[1], 7}};
  auto const colors = trip_colors(s->size(), colored);
  auto const pb = make_point_buffer(*s, status, colors, 42, kFlagBrushActive | kFlagHasQueries);
  auto const bytes = encode(pb);
  REQUIRE(bytes.size() == point_buffer_size(s->size()));
  CHECK(decode_point_buffer(bytes) == pb);

  std::uint64_t rev;
  std::uint32_t n, flags;
  auto const raw = parse_raw(bytes, rev, n, flags);
  CHECK(rev == 42);
  CHECK(n == s->size());
  CHECK(flags == 3);
  auto const b = s->bounds();
  auto const iv = s->interval();
  auto const trips = oracle::trips_of(*s);
  for (std::size_t i = 0; i != s->size(); ++i) {
    auto const& p = raw[i];
    auto const& d = raw[s->size() + i];
    REQUIRE(p.x == doctest::Approx((trips[i].px - b.min_x) / b.width()).epsilon(1e-6));
    REQUIRE(d.y == doctest::Approx((trips[i].dy - b.min_y) / b.height()).epsilon(1e-6));
    REQUIRE(p.t == doctest::Approx(double(trips[i].pt - iv.start.epoch_seconds) /
                                   double(iv.duration())).epsilon(1e-6));
    for (auto const& q : {p, d}) {
      REQUIRE(q.x >= 0.f);
      REQUIRE(q.x <= 1.f);
      REQUIRE(q.t >= 0.f);
      REQUIRE(q.t <= 1.f);
    }
    REQUIRE(p.status == static_cast<std::uint8_t>(status.pickup(i)));
    auto const expected_color = qs[0].test(i) ? 4 : qs[1].test(i) ? 7 : kNoColor;
    REQUIRE(p.color == expected_color);
    REQUIRE(d.color == expected_color);
  }

  CHECK_THROWS_AS(decode_point_buffer(bytes.substr(0, bytes.size() - 1)), parse_error);
  auto bad = bytes;
  bad[16 + 12] = 9;
  CHECK_THROWS_AS(decode_point_buffer(bad), parse_error);
}

TEST_CASE("session: frames follow state changes only") {
  gen::rng r{2};
  auto const s = gen::random_snapshot(r, 3000);
  session sess{s};
  CHECK(sess.wait_frame(0, 50ms) == nullptr);  // nothing changed yet

  auto const id = sess.mutate(
      [&](query_manager& m) { return m.create_atomic(gen::random_prism(r, *s)); });
  auto const f1 = sess.wait_frame(0, 2000ms);
  REQUIRE(f1);
  auto const expected = sess.read([](query_manager const& m) {
    return evaluate_frame(m, std::nullopt, 0);
  });
  CHECK(f1->revision == expected.revision);
  CHECK(f1->points == expected.points);
  REQUIRE(f1->queries.size() == 1);
  CHECK(f1->queries[0].id == id);

  // a read-only mutate (no revision change) yields no frame
  sess.mutate([](query_manager& m) { (void)m.ids(); });
  CHECK(sess.wait_frame(f1->sequence, 150ms) == nullptr);
  // a failing mutation neither
  CHECK_THROWS_AS(sess.mutate([](query_manager& m) { m.remove(999); }), not_found_error);
  CHECK(sess.wait_frame(f1->sequence, 150ms) == nullptr);
}

TEST_CASE("session: latest-wins brush coalescing") {
  gen::rng r{3};
  auto const s = gen::random_snapshot(r, 20000);
  session sess{s};
  sess.set_eval_delay(40ms);
  std::vector<brush_spec> brushes;
  for (int i = 0; i != 30; ++i) {
    brushes.push_back(gen::random_brush(r, *s));
  }
  for (std::size_t i = 0; i != brushes.size(); ++i) {
    REQUIRE(sess.submit_brush(i + 1, brushes[i]));
    std::this_thread::sleep_for(3ms);
  }
  CHECK(!sess.submit_brush(30, brushes[0]));  // stale
  CHECK(!sess.submit_brush(5, brushes[0]));
  CHECK(sess.brush_seq() == 30);

  std::shared_ptr<session_frame const> f;
  for (std::uint64_t after = 0;;) {
    f = sess.wait_frame(after, 3000ms);
    REQUIRE(f);
    if (f->brush_seq == 30) break;
    after = f->sequence;
  }
  MESSAGE(sess.evaluations() << " evaluations for 30 brush updates");
  CHECK(sess.evaluations() < 30);
  auto const expected = sess.read([&](query_manager const& m) {
    return evaluate_frame(m, brushes.back(), 30);
  });
  CHECK(f->points == expected.points);
  CHECK(*f->brush_mask == *expected.brush_mask);
  CHECK(f->brush_stats == expected.brush_stats);
  // the brush mask matches the oracle
  auto const trips = oracle::trips_of(*s);
  CHECK(oracle::same(*f->brush_mask, oracle::mask_of(trips, [&](auto const& t) {
                       return oracle::brush_hit(t, brushes.back());
                     })));

  CHECK_THROWS_AS(sess.submit_brush(31, brush_spec{}), domain_error);
  CHECK(sess.brush_seq() == 30);
  CHECK(sess.submit_brush(31, std::nullopt));
}

TEST_CASE("session: query edits are not blocked by a slow evaluation") {
  gen::rng r{4};
  auto const s = gen::random_snapshot(r, 5000);
  session sess{s};
  sess.set_eval_delay(400ms);
  sess.submit_brush(1, gen::random_brush(r, *s));
  std::this_thread::sleep_for(20ms);  // worker now sleeps inside evaluation
  auto const t0 = std::chrono::steady_clock::now();
  sess.mutate([&](query_manager& m) { m.create_atomic(gen::random_prism(r, *s)); });
  auto const ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
  CHECK(ms < 100);
  // the edit shows up in a later frame
  std::shared_ptr<session_frame const> f;
  for (std::uint64_t after = 0;;) {
    f = sess.wait_frame(after, 3000ms);
    REQUIRE(f);
    if (f->revision == 1) break;
    after = f->sequence;
  }
  CHECK(f->queries.size() == 1);
}

TEST_CASE("http: dataset, query lifecycle and errors") {
  gen::rng r{5};
  auto const s = gen::random_snapshot(r, 4000);
  auto const trips = oracle::trips_of(*s);
  running_server srv{s};
  CHECK(srv.get("/health")["status"] == "ok");
  auto const list = srv.get("/datasets");
  CHECK(list.dump().find(srv.id) != std::string::npos);
  auto const meta = srv.get("/datasets/" + srv.id);
  CHECK(meta["n"] == s->size());
  srv.get("/datasets/nope", 404);

  auto const qa = gen::random_atomic(r, *s);
  auto const a = srv.post("/queries", query_spec_to_json(qa), 201);
  auto const ida = a["id"].get<std::uint64_t>();
  auto const tz = s->zone().name();
  auto const count_of = [&](query_spec const& q) {
    return oracle::count(oracle::mask_of(trips, [&](auto const& t) {
      return oracle::query_hit(t, q, tz);
    }));
  };
  CHECK(a["count"] == count_of(qa));

  auto const qb = gen::random_atomic(r, *s);
  auto const idb = srv.post("/queries", query_spec_to_json(qb), 201)["id"].get<std::uint64_t>();
  auto const linked = srv.post("/queries/" + std::to_string(ida) + "/link",
                               {{"destination", idb}}, 201);
  auto const idd = linked["id"].get<std::uint64_t>();
  CHECK(linked["variant"] == "directional");
  srv.get("/queries/" + std::to_string(ida), 404);

  // PATCH recurrence and compare with the oracle via the manager's spec
  auto const patched = [&] {
    auto const resp = srv.cli->Patch("/queries/" + std::to_string(idd),
                                     json{{"recurrence", {{"weekdays", {"Mon", "Tue"}}}}}.dump(),
                                     "application/json");
    REQUIRE(resp);
    CHECK(resp->status == 200);
    return json::parse(resp->body);
  }();
  auto const spec = srv.srv.find_session(srv.id)->read(
      [&](query_manager const& m) { return m.spec(idd); });
  CHECK(patched["count"] == count_of(spec));

  auto const reverted = srv.post("/queries/" + std::to_string(idd) + "/revert", json::object(), 200);
  CHECK(reverted["restored"].size() == 2);

  auto const merged = srv.post("/queries/" + std::to_string(ida) + "/merge", {{"with", idb}}, 201);
  CHECK(merged["variant"] == "merged");
  auto const self = srv.post("/queries/" + merged["id"].dump() + "/merge",
                             {{"with", merged["id"]}}, 201);
  CHECK(!self["warnings"].empty());

  auto const queries = srv.get("/queries");
  CHECK(queries["queries"].size() == 1);

  // constraints
  auto const cons = [&] {
    auto const resp = srv.cli->Put("/constraints",
                                   json{{"constraints", {{{"attribute", "fare"}, {"min", 10}}}}}.dump(),
                                   "application/json");
    REQUIRE(resp);
    CHECK(resp->status == 200);
    return json::parse(resp->body);
  }();
  std::size_t expected_global = 0;
  for (auto const& t : trips) expected_global += t.attr[2] >= 10 ? 1 : 0;
  CHECK(cons["global_count"] == expected_global);

  // errors
  srv.post("/queries", json{{"variant", "cube"}}, 422);
  {
    auto const resp = srv.cli->Post("/queries", "{not json", "application/json");
    REQUIRE(resp);
    CHECK(resp->status == 400);
  }
  srv.post("/queries/" + merged["id"].dump() + "/link", {{"destination", 12345}}, 404);
  auto const atom = srv.post("/queries", query_spec_to_json(gen::random_atomic(r, *s)), 201);
  srv.post("/queries/" + merged["id"].dump() + "/link", {{"destination", atom["id"]}}, 409);
  srv.post("/recurrence", {{"target", "all"}, {"recurrence", {{"timezone", "Mars/Olympus"}}}}, 422);
  {
    auto const resp = srv.cli->Delete("/queries/" + atom["id"].dump());
    REQUIRE(resp);
    CHECK(resp->status == 200);
    auto const again = srv.cli->Delete("/queries/" + atom["id"].dump());
    CHECK(again->status == 404);
  }
}

TEST_CASE("http: dataset upload") {
  running_server srv{nullptr, {}, fixture::source_dir()};
  srv.get("/queries", 404);  // nothing loaded yet
  auto const map = json::parse(fixture::read_file(fixture::source_dir() / "five_trips_map.json"));
  auto const meta = srv.post("/datasets", {{"path", "five_trips.csv"}, {"column_map", map}}, 201);
  CHECK(meta["n"] == 5);
  CHECK(meta["report"]["accepted"] == 5);
  CHECK(meta["interval"].size() == 2);
  CHECK(srv.get("/datasets/" + meta["id"].get<std::string>())["n"] == 5);
  CHECK(srv.get("/queries")["global_count"] == 5);  // new dataset is active

  auto bad = map;
  bad["fields"]["fare"] = "no_such_column";
  auto const err = srv.post("/datasets", {{"path", "five_trips.csv"}, {"column_map", bad}}, 422);
  CHECK(err["error"] == "SchemaError");
  auto const zero = srv.post("/datasets", {{"csv", fixture::read_file(fixture::source_dir() / "five_trips.csv").substr(0, 200)},
                                           {"column_map", map}, {"reject_policy", "drop"}}, 422);
  CHECK(zero["error"] == "EmptyDataset");
  CHECK(zero.contains("report"));
  srv.post("/datasets", {{"path", "missing.csv"}}, 404);

  // 100k-trip upload is ready well within 10 s
  synth_options opt;
  opt.trips = 100000;
  auto const csv = trips_to_csv(synthesize_trips(opt), time_zone::load(opt.timezone));
  auto const t0 = std::chrono::steady_clock::now();
  auto const big = srv.post("/datasets", {{"csv", csv}}, 201);
  auto const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(big["n"] == 100000);
  MESSAGE("100k upload + ingest took " << secs << " s");
  CHECK(secs < 10.0);
}

TEST_CASE("http: aggregates") {
  gen::rng r{6};
  auto const s = gen::random_snapshot(r, 3000);
  auto const regions = parse_neighborhoods(fixture::read_file(fixture::source_dir() / "two_squares.geojson"));
  running_server srv{s, regions.set};
  auto const ts = srv.get("/aggregates/timeseries?granularity=day&kind=origin");
  double total = 0;
  for (auto const& b : ts["buckets"]) total += b["value"].is_null() ? 0 : b["value"].get<double>();
  CHECK(total == static_cast<double>(s->size()));
  auto const csv = srv.cli->Get("/aggregates/timeseries?granularity=day&format=csv");
  REQUIRE(csv);
  CHECK(csv->body.rfind("bucket_start,bucket_start_utc,value\n", 0) == 0);
  auto const h = srv.get("/aggregates/histogram?attribute=fare&bins=10");
  std::size_t hc = 0;
  for (auto const& c : h["bins"]) hc += c["value"].get<std::size_t>();
  CHECK(hc == s->size());
  auto const ch = srv.get("/aggregates/choropleth?kind=origin");
  std::size_t cc = ch["unassigned"].get<std::size_t>();
  for (auto const& c : ch["regions"]) cc += c["count"].get<std::size_t>();
  CHECK(cc == s->size());
  srv.get("/aggregates/stack?neighborhood=A");
  srv.get("/aggregates/stack?neighborhood=Nowhere", 404);
  srv.get("/aggregates/pie", 404);
  srv.get("/aggregates/timeseries?granularity=fortnight", 400);
  srv.get("/aggregates/timeseries?query=77", 404);

  // an empty query gives all-zero buckets
  auto const iv = s->interval();
  auto const empty_q =
      json::parse(R"({"kind": "origin", "prism": {"polygon": [[0, 0], [1, 0], [1, 1], [0, 1]]}})");
  auto const eq = srv.post("/queries", empty_q, 201);
  CHECK(eq["count"] == 0);
  auto const zeros = srv.get("/aggregates/timeseries?granularity=day&query=" + eq["id"].dump());
  CHECK(!zeros["buckets"].empty());
  for (auto const& b : zeros["buckets"]) CHECK(b["value"] == 0);

  // a 7-day span picks hourly buckets
  auto const week = srv.get("/aggregates/timeseries?span=" + std::to_string(iv.start.epoch_seconds) +
                            "," + std::to_string(iv.start.epoch_seconds + 7 * 86400));
  CHECK(week["granularity"] == "hour");

  // stack totals equal choropleth counts
  auto const q = srv.post("/queries", query_spec_to_json(gen::random_atomic(r, *s)), 201);
  auto const table = srv.get("/aggregates/choropleth?kind=origin&query=" + q["id"].dump());
  for (auto const& region : table["regions"]) {
    auto const st = srv.get("/aggregates/stack?kind=origin&query=" + q["id"].dump() +
                            "&neighborhood=" + region["name"].get<std::string>());
    double total = 0;
    for (auto const& b : st["buckets"]) total += b["value"].is_null() ? 0 : b["value"].get<double>();
    CHECK(total == region["count"].get<double>());
  }
}

TEST_CASE("http: brush frames and stream") {
  gen::rng r{7};
  auto const s = gen::random_snapshot(r, 5000);
  running_server srv{s};
  auto const sess = srv.srv.find_session(srv.id);
  auto const b = gen::random_brush(r, *s);
  json bj;
  if (b.origin_volume) bj["origin"] = prism_to_json(*b.origin_volume);
  if (b.destination_volume) bj["destination"] = prism_to_json(*b.destination_volume);
  if (b.single_kind) bj["kind"] = std::string{to_string(*b.single_kind)};
  CHECK(srv.post("/session/brush", {{"seq", 1}, {"brush", bj}}, 202)["accepted"] == true);
  CHECK(srv.post("/session/brush", {{"seq", 1}, {"brush", bj}}, 202)["accepted"] == false);
  srv.post("/session/brush", {{"seq", 2}, {"brush", {{"origin", "bad"}}}}, 422);
  srv.post("/session/brush", {{"brush", bj}}, 400);
  // still accepted after a malformed request
  CHECK(srv.post("/session/brush", {{"seq", 2}, {"brush", bj}}, 202)["accepted"] == true);

  std::shared_ptr<session_frame const> f;
  std::uint64_t after = 0;
  httplib::Result resp;
  do {
    resp = srv.cli->Get("/session/frame?timeout_ms=3000&after=" + std::to_string(after));
    REQUIRE(resp);
    REQUIRE(resp->status == 200);
    after = std::stoull(resp->get_header_value("X-Frame-Sequence"));
  } while (resp->get_header_value("X-Brush-Seq") != "2");
  auto const expected = sess->read([&](query_manager const& m) { return evaluate_frame(m, b, 2); });
  CHECK(resp->body == expected.points);
  auto const pb = decode_point_buffer(resp->body);
  CHECK(pb.n == s->size());
  CHECK((pb.flags & kFlagBrushActive) != 0);

  auto const none = srv.cli->Get("/session/frame?timeout_ms=100&after=" + std::to_string(after));
  REQUIRE(none);
  CHECK(none->status == 204);
  auto const state = srv.get("/session/state");
  CHECK(state["brush_seq"] == 2);
  CHECK(state["brush"]["count"] == expected.brush_stats->count);

  // stream: one framed message pair per frame
  std::string stream;
  std::thread poke{[&] {
    std::this_thread::sleep_for(100ms);
    httplib::Client other{"127.0.0.1", srv.port};
    other.Post("/session/brush", json{{"seq", 3}, {"brush", nullptr}}.dump(), "application/json");
  }};
  auto const sr = srv.cli->Get("/session/stream?max_frames=1&after=" + std::to_string(after),
                               [&](char const* data, std::size_t len) {
                                 stream.append(data, len);
                                 return true;
                               });
  poke.join();
  REQUIRE(sr);
  REQUIRE(stream.size() > 10);
  CHECK(stream[0] == 1);
  std::uint32_t len1;
  std::memcpy(&len1, stream.data() + 1, 4);
  auto const control = json::parse(stream.substr(5, len1));
  CHECK(control["brush_seq"] == 3);
  CHECK(control["brush_active"] == false);
  CHECK(stream[5 + len1] == 2);
  std::uint32_t len2;
  std::memcpy(&len2, stream.data() + 6 + len1, 4);
  CHECK(len2 == point_buffer_size(s->size()));
  CHECK(stream.size() == 10 + len1 + len2);
}

TEST_CASE("http: loopback brush latency at 100k trips") {
  synth_options opt;
  opt.trips = 100000;
  auto const s = std::make_shared<dataset_snapshot const>(synthesize_trips(opt), opt.timezone);
  running_server srv{s};
  gen::rng r{8};
  std::vector<double> ms;
  std::uint64_t after = 0;
  for (std::uint64_t seq = 1; seq != 41; ++seq) {
    auto const b = gen::random_brush(r, *s);
    json bj;
    if (b.origin_volume) bj["origin"] = prism_to_json(*b.origin_volume);
    if (b.destination_volume) bj["destination"] = prism_to_json(*b.destination_volume);
    if (b.single_kind) bj["kind"] = std::string{to_string(*b.single_kind)};
    auto const t0 = std::chrono::steady_clock::now();
    srv.post("/session/brush", {{"seq", seq}, {"brush", bj}}, 202);
    while (true) {
      auto const resp = srv.cli->Get("/session/frame?timeout_ms=2000&after=" + std::to_string(after));
      REQUIRE(resp);
      REQUIRE(resp->status == 200);
      after = std::stoull(resp->get_header_value("X-Frame-Sequence"));
      if (resp->get_header_value("X-Brush-Seq") == std::to_string(seq)) break;
    }
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  auto const p95 = ms[static_cast<std::size_t>(std::ceil(0.95 * ms.size())) - 1];
  MESSAGE("brush -> frame p50 " << ms[ms.size() / 2] << " ms, p95 " << p95 << " ms");
  CHECK(p95 <= 100.0);
}
