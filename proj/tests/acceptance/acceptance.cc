// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when
// any fails. Informational lines start with "NOTE".

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "odcube/aggregation/aggregates.h"
#include "odcube/cli/bench.h"
#include "odcube/core/error.h"
#include "odcube/engine/evaluate.h"
#include "odcube/query/query_manager.h"
#include "odcube/service/point_buffer.h"
#include "odcube/service/session.h"
#include "odcube/synth/synthetic.h"

#include "fixtures.h"
#include "oracle.h"
#include "random_cases.h"
#include "scenarios.h"

using namespace odcube;
using nlohmann::json;

namespace {

struct outcome {
  bool ok{true};
  std::string detail;
};

// Collects the first failure; later checks still run.
struct checker {
  bool ok{true};
  std::string first;
  std::size_t checks{0};

  void operator()(bool const cond, std::string const& what) {
    ++checks;
    if (!cond && ok) {
      ok = false;
      first = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point const t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double const v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

outcome oracle_equivalence() {
  auto const t0 = std::chrono::steady_clock::now();
  checker c;
  std::size_t cases = 0;
  for (std::uint64_t seed = 1; seed <= 20 || cases < 1000; ++seed) {
    gen::rng r{seed * 7919};
    auto const s = gen::random_snapshot(r, static_cast<std::size_t>(r.range(200, 10000)));
    auto const trips = oracle::trips_of(*s);
    auto const tz = s->zone().name();
    query_manager m{s};
    m.set_constraints(gen::random_constraints(r));
    for (int k = 0; k != 40; ++k) {
      auto const op = r.range(0, 4);
      try {
        if (op == 0 && m.ids().size() >= 2) {
          auto const ids = m.ids();
          m.link_directional(ids[0], ids[1]);
        } else if (op == 1 && m.ids().size() >= 2) {
          auto const ids = m.ids();
          m.merge(ids[ids.size() - 1], ids[ids.size() - 2]);
        } else if (op == 2 && !m.ids().empty()) {
          m.apply_recurrence(m.ids().back(), gen::random_pattern(r));
        } else {
          m.add(gen::random_query(r, *s));
        }
      } catch (domain_error const&) {
        continue;  // illegal edit for the current query mix
      }
      m.take_warnings();
      for (auto const id : m.ids()) {
        auto const& q = m.spec(id);
        auto const expected = oracle::mask_of(trips, [&](oracle::trip const& t) {
          return oracle::query_hit(t, q, tz) && oracle::constraints_hit(t, m.constraints());
        });
        c(oracle::same(*m.result(id).mask, expected),
          "query " + std::to_string(id) + " seed " + std::to_string(seed));
        ++cases;
      }
      auto const b = gen::random_brush(r, *s);
      c(oracle::same(eval_brush(*s, b),
                     oracle::mask_of(trips, [&](auto const& t) { return oracle::brush_hit(t, b); })),
        "brush, seed " + std::to_string(seed));
      ++cases;
      if (m.ids().size() > 6) {
        m.remove(m.ids().front());
      }
    }
  }
  auto const secs = seconds_since(t0);
  c(secs < 120, "runtime " + fmt(secs) + " s");
  return {c.ok && cases >= 1000,
          std::to_string(cases) + " cases in " + fmt(secs) + " s" +
              (c.ok ? "" : "; first mismatch: " + c.first)};
}

outcome composition_laws() {
  checker c;
  gen::rng r{424242};
  auto const s = gen::random_snapshot(r, 8000);
  auto const full = result_mask::full(s->size());
  for (int k = 0; k != 100; ++k) {
    auto const p = gen::random_prism(r, *s);
    c(eval_prism(*s, p, event_kind::either) ==
          (eval_prism(*s, p, event_kind::origin) | eval_prism(*s, p, event_kind::destination)),
      "either");
  }
  for (int k = 0; k != 100; ++k) {
    auto q = gen::random_directional(r, *s);
    q.recurrence.reset();
    auto const& d = std::get<directional_query>(q.shape);
    c(eval_query(*s, q) == (eval_prism(*s, d.origin, event_kind::origin) &
                            eval_prism(*s, d.destination, event_kind::destination)),
      "directional");
  }
  for (int k = 0; k != 100; ++k) {
    auto const q = gen::random_merged(r, *s);
    auto const& mq = std::get<merged_query>(q.shape);
    auto expected = result_mask{s->size()};
    for (auto const& member : mq.members) {
      expected |= eval_query(*s, member, {}, q.recurrence ? &*q.recurrence : nullptr);
    }
    c(eval_query(*s, q) == expected, "merged");
  }
  for (int k = 0; k != 100; ++k) {
    auto q = r.coin() ? gen::random_atomic(r, *s) : gen::random_directional(r, *s);
    auto const pattern = gen::random_pattern(r);
    q.recurrence.reset();
    auto const plain = eval_query(*s, q);
    q.recurrence = pattern;
    c(eval_query(*s, q) == (plain & eval_recurrence(*s, pattern, recurrence_kind(q))),
      "recurrence");
  }
  return {c.ok, "4 laws x 100 cases" + (c.ok ? std::string{} : "; failed: " + c.first)};
}

outcome aggregate_conservation() {
  checker c;
  gen::rng r{777};
  std::size_t cases = 0;
  for (int round = 0; round != 10; ++round) {
    auto const s = gen::random_snapshot(r, 5000);
    std::vector<neighborhood> regions;
    for (int i = 0; i != 5; ++i) {
      regions.push_back({"r" + std::to_string(i), gen::random_polygon(r, *s)});
    }
    neighborhood_set const set{regions};
    for (int k = 0; k != 10; ++k, ++cases) {
      auto const mask = eval_query(*s, gen::random_query(r, *s));
      auto const n = mask.count();
      auto const kind = gen::random_kind(r);
      auto const g = static_cast<time_granularity>(r.range(0, 5));
      auto const ts = time_series(*s, mask, s->interval(), g, measure::count(), kind);
      double total = 0;
      for (auto const& v : ts.values) total += v.value_or(0);
      c(total == static_cast<double>(n), "time series total");
      auto const h = histogram(*s, mask, static_cast<attribute>(r.range(0, 3)),
                               static_cast<std::size_t>(r.range(1, 50)));
      std::size_t hn = 0;
      for (auto const v : h.counts) hn += v;
      c(hn == n, "histogram total");
      auto const ch = choropleth(*s, mask, set, kind);
      std::size_t cn = ch.unassigned;
      for (auto const& [name, v] : ch.counts) cn += v;
      c(cn == n, "choropleth total");
    }
  }
  // Day == sum of Hour over the 2012 fall-back week
  std::size_t dst_days = 0;
  for (std::uint64_t seed = 1; seed != 4; ++seed) {
    synth_options opt;
    opt.trips = 20000;
    opt.seed = seed;
    opt.start = fixture::local("2012-10-29 00:00:00");
    opt.days = 7;
    auto const s = dataset_snapshot{synthesize_trips(opt), opt.timezone};
    auto const span = make_interval(opt.start, fixture::local("2012-11-05 00:00:00"));
    auto const mask = eval_query(s, gen::random_query(r, s));
    for (auto const kind : {event_kind::origin, event_kind::destination}) {
      auto const days = time_series(s, mask, span, time_granularity::day, measure::count(), kind);
      auto const hours = time_series(s, mask, span, time_granularity::hour, measure::count(), kind);
      c(days.bucket_starts.size() == 7, "7 local days");
      c(hours.bucket_starts.size() == 7 * 24 + 1, "169 local hours");
      for (std::size_t d = 0; d != days.bucket_starts.size(); ++d) {
        auto const lo = days.bucket_starts[d];
        auto const hi = d + 1 < days.bucket_starts.size() ? days.bucket_starts[d + 1]
                                                          : span.end.epoch_seconds;
        double sum = 0;
        std::size_t hour_buckets = 0;
        for (std::size_t i = 0; i != hours.bucket_starts.size(); ++i) {
          if (hours.bucket_starts[i] >= lo && hours.bucket_starts[i] < hi) {
            sum += hours.values[i].value_or(0);
            ++hour_buckets;
          }
        }
        c(sum == days.values[d].value_or(0), "day vs hours");
        if (lo == fixture::local("2012-11-04 00:00:00")) {
          c(hour_buckets == 25, "25 hours on 2012-11-04");
          ++dst_days;
        }
      }
    }
  }
  c(dst_days > 0, "no DST day covered");
  return {c.ok, std::to_string(cases) + " randomized selections, " + std::to_string(c.checks) +
                    " checks" + (c.ok ? std::string{} : "; failed: " + c.first)};
}

outcome performance() {
  synth_options opt;
  opt.trips = 100000;
  auto const s = dataset_snapshot{synthesize_trips(opt), opt.timezone};
  bench_options b;
  b.operations = {"prism", "directional", "pipeline"};
  b.repeat = 200;
  b.warmup = 10;
  b.cases = 32;
  auto const report = run_bench(s, b);
  auto const p95 = [&](char const* op) {
    return report["operations"][op]["p95_ms"].get<double>();
  };
  auto const prism_ms = p95("prism"), dir_ms = p95("directional"), pipe_ms = p95("pipeline");
  bool const ok = prism_ms < 50 && dir_ms < 80 && pipe_ms < 500;
  return {ok, "100k trips, p95 prism " + fmt(prism_ms) + " ms (< 50), directional " +
                  fmt(dir_ms) + " ms (< 80), pipeline " + fmt(pipe_ms) + " ms (< 500)"};
}

void stretch_note() {
  if (std::getenv("ODCUBE_SKIP_STRETCH") != nullptr) {
    std::printf("NOTE stretch 1M-trip prism eval: skipped (ODCUBE_SKIP_STRETCH)\n");
    return;
  }
  synth_options opt;
  opt.trips = 1000000;
  opt.days = 28;
  auto const s = dataset_snapshot{synthesize_trips(opt), opt.timezone};
  bench_options b;
  b.operations = {"prism"};
  b.repeat = 40;
  b.warmup = 3;
  auto const report = run_bench(s, b);
  auto const p95 = report["operations"]["prism"]["p95_ms"].get<double>();
  std::printf("NOTE stretch 1M-trip prism eval p95 %s ms (target < 500, non-gating): %s\n",
              fmt(p95).c_str(), p95 < 500 ? "met" : "missed");
}

outcome scenario_regression() {
  checker c;
  auto const counts_of = [&](std::string const& name, scenario::planted const& p) {
    auto const dir = fixture::temp_dir("acceptance-" + name);
    auto const rc = fixture::replay_scenario(name, p.csv, dir);
    c(rc == 0, name + ": CLI exit " + std::to_string(rc));
    return std::pair{rc == 0 ? json::parse(fixture::read_file(dir / "out" / "counts.json")) : json{},
                     dir};
  };
  auto const day_values = [](std::string const& csv) {
    std::vector<double> out;
    std::istringstream in{csv};
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      out.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    }
    return out;
  };

  auto const sandy = scenario::sandy();
  if (auto const [counts, dir] = counts_of("sandy", sandy); !counts.is_null()) {
    c(counts["city"] == sandy.counts.at("city"), "sandy total");
    auto const days = day_values(fixture::read_file(dir / "out" / "city.timeseries.day.csv"));
    c(days.size() == sandy.per_day.size(), "sandy day count");
    for (std::size_t i = 0; i != std::min(days.size(), sandy.per_day.size()); ++i) {
      c(days[i] == static_cast<double>(sandy.per_day[i].second), "sandy day " + sandy.per_day[i].first);
    }
    c(std::min_element(days.begin(), days.end()) - days.begin() ==
          static_cast<std::ptrdiff_t>(sandy.counts.at("trough_day")),
      "sandy trough");
  }
  auto const air = scenario::airports();
  if (auto const [counts, dir] = counts_of("airports", air); !counts.is_null()) {
    c(counts["airports"] == air.counts.at("airports"), "airports merged");
    c(counts["all"] == air.counts.at("all"), "airports all");
    auto const stats = json::parse(fixture::read_file(dir / "out" / "stats.json"));
    c(stats["exports"]["lm_jfk"]["count"] == air.counts.at("lm_jfk"), "lm->jfk");
    c(stats["exports"]["lm_lga"]["count"] == air.counts.at("lm_lga"), "lm->lga");
    c(stats["exports"]["lm_jfk"]["attributes"]["fare"]["min"] == 52.0 &&
          stats["exports"]["lm_jfk"]["attributes"]["fare"]["max"] == 52.0,
      "jfk flat fare");
  }
  auto const eve = scenario::evening();
  if (auto const [counts, dir] = counts_of("evening", eve); !counts.is_null()) {
    c(counts["lm_evening"] == eve.counts.at("lm_evening"), "evening dropoffs");
    c(counts["lm_all_day"] == eve.counts.at("lm_all_day"), "all-day dropoffs");
    auto const days = day_values(fixture::read_file(dir / "out" / "lm_evening.timeseries.day.csv"));
    c(days.size() == eve.per_day.size(), "evening day count");
    for (std::size_t i = 0; i != std::min(days.size(), eve.per_day.size()); ++i) {
      c(days[i] == static_cast<double>(eve.per_day[i].second), "evening " + eve.per_day[i].first);
    }
  }
  return {c.ok, "sandy, airports, evening via odcube ingest + query; " + std::to_string(c.checks) +
                    " checks" + (c.ok ? std::string{} : "; failed: " + c.first)};
}

outcome service_contract() {
  using namespace std::chrono_literals;
  checker c;
  gen::rng r{31337};
  auto const s = gen::random_snapshot(r, 20000);
  session sess{s};
  sess.mutate([&](query_manager& m) {
    m.add(gen::random_atomic(r, *s));
    m.add(gen::random_directional(r, *s));
  });
  sess.set_eval_delay(5ms);
  brush_spec last;
  for (std::uint64_t seq = 1; seq <= 100; ++seq) {
    last = gen::random_brush(r, *s);
    sess.submit_brush(seq, last);
  }
  std::shared_ptr<session_frame const> f;
  for (std::uint64_t after = 0;;) {
    f = sess.wait_frame(after, 5000ms);
    if (f == nullptr || f->brush_seq == 100) break;
    after = f->sequence;
  }
  c(f != nullptr, "no frame for brush 100");
  if (f) {
    auto const expected = sess.read([&](query_manager const& m) { return evaluate_frame(m, last, 100); });
    c(f->points == expected.points, "frame points differ from standalone evaluation");
    c(*f->brush_mask == *expected.brush_mask, "brush mask differs");
    c(f->brush_stats == expected.brush_stats, "brush stats differ");
  }
  auto const evals = sess.evaluations();

  // encode/decode keeps every status and color
  for (int k = 0; k != 50; ++k) {
    auto const n = s->size();
    status_vector st;
    std::vector<std::uint8_t> colors(n);
    for (std::size_t i = 0; i != 2 * n; ++i) {
      st.points.push_back(static_cast<point_status>(r.range(0, 3)));
    }
    for (auto& col : colors) col = static_cast<std::uint8_t>(r.coin(0.2) ? kNoColor : r.range(0, 11));
    auto const pb = make_point_buffer(*s, st, colors, static_cast<std::uint64_t>(k), 0);
    auto const back = decode_point_buffer(encode(pb));
    bool same = back == pb;
    for (std::size_t i = 0; i != 2 * n && same; ++i) {
      same = back.points[i].status == st.points[i] && back.points[i].color == colors[i % n];
    }
    c(same, "point buffer round trip");
  }
  return {c.ok, "100-update burst coalesced into " + std::to_string(evals) +
                    " evaluations; final frame equals standalone evaluation; 50 buffer round trips" +
                    (c.ok ? std::string{} : "; failed: " + c.first)};
}

}  // namespace

int main() {
  std::pair<char const*, std::function<outcome()>> const criteria[] = {
      {"oracle-equivalence", oracle_equivalence},
      {"composition-laws", composition_laws},
      {"aggregate-conservation", aggregate_conservation},
      {"performance-budget", performance},
      {"scenario-regression", scenario_regression},
      {"service-contract", service_contract},
  };
  auto failures = 0;
  for (auto const& [name, fn] : criteria) {
    outcome o;
    try {
      o = fn();
    } catch (std::exception const& e) {
      o = {false, std::string{"exception: "} + e.what()};
    }
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
    if (std::string_view{name} == "performance-budget") {
      stretch_note();
    }
  }
  return failures == 0 ? 0 : 1;
}
