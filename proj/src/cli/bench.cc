#include "odcube/cli/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "odcube/aggregation/aggregates.h"
#include "odcube/core/error.h"
#include "odcube/engine/evaluate.h"
#include "odcube/query/query_spec.h"
#include "odcube/query/stats.h"

namespace odcube {

using nlohmann::json;

bench_options bench_options::from_json(json const& j) {
  if (!j.is_object()) {
    throw schema_error{"bench workload must be an object"};
  }
  bench_options o;
  try {
    if (j.contains("operations")) {
      o.operations = j["operations"].get<std::vector<std::string>>();
    }
    o.cases = j.value("cases", o.cases);
    o.repeat = j.value("repeat", o.repeat);
    o.warmup = j.value("warmup", o.warmup);
    o.seed = j.value("seed", o.seed);
  } catch (json::exception const& e) {
    throw schema_error{std::string{"bench workload: "} + e.what()};
  }
  if (o.cases == 0 || o.repeat == 0) {
    throw schema_error{"bench workload: cases and repeat must be positive"};
  }
  return o;
}

double percentile(std::vector<double> samples, double const q) {
  if (samples.empty()) {
    return 0.0;
  }
  std::sort(samples.begin(), samples.end());
  auto const rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

latency_summary summarize(std::vector<double> const& samples_ms) {
  latency_summary s;
  s.samples = samples_ms.size();
  if (samples_ms.empty()) {
    return s;
  }
  s.p50_ms = percentile(samples_ms, 0.50);
  s.p95_ms = percentile(samples_ms, 0.95);
  s.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
              static_cast<double>(samples_ms.size());
  s.max_ms = *std::max_element(samples_ms.begin(), samples_ms.end());
  return s;
}

namespace {

class workload_gen {
public:
  workload_gen(dataset_snapshot const& s, std::uint64_t const seed) : s_{s}, rng_{seed} {}

  double unit() { return std::uniform_real_distribution<double>{0.0, 1.0}(rng_); }

  // Hexagon around a random trip endpoint, 5-30% of the extent across;
  // interval covering 10-100% of the dataset.
  prism random_prism() {
    auto const i = std::uniform_int_distribution<std::size_t>{0, s_.size() - 1}(rng_);
    auto const e = unit() < 0.5 ? endpoint::pickup : endpoint::dropoff;
    auto const c = s_.position(e, i);
    auto const extent = std::max(s_.bounds().width(), s_.bounds().height());
    auto const r = extent * (0.025 + 0.125 * unit());
    std::vector<plane_point> ring;
    for (auto k = 0; k != 6; ++k) {
      auto const a = (k + unit() * 0.5) * 3.14159265358979323846 / 3.0;
      ring.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    auto const iv = s_.interval();
    auto const len = static_cast<std::int64_t>(
        static_cast<double>(iv.duration()) * (0.1 + 0.9 * unit()));
    auto const start = iv.start.epoch_seconds +
                       static_cast<std::int64_t>(unit() * static_cast<double>(iv.duration() - len));
    return {polygon{std::move(ring)}, make_interval(start, start + len)};
  }

  recurrence_pattern random_recurrence() {
    recurrence_pattern p;
    p.weekdays = static_cast<std::uint8_t>(1 + unit() * 126);
    auto const a = static_cast<int>(unit() * 1380);
    p.hours = minute_range{a, a + 60 + static_cast<int>(unit() * (1440 - a - 60))};
    return p;
  }

  event_kind random_kind() {
    return static_cast<event_kind>(std::uniform_int_distribution<int>{0, 2}(rng_));
  }

private:
  dataset_snapshot const& s_;
  std::mt19937_64 rng_;
};

template <typename Fn>
std::vector<double> time_runs(std::size_t const warmup, std::size_t const repeat,
                            std::size_t const cases, Fn&& fn) {
  std::vector<double> ms;
  ms.reserve(repeat);
  for (auto i = std::size_t{0}; i != warmup + repeat; ++i) {
    auto const t0 = std::chrono::steady_clock::now();
    fn(i % cases);
    auto const t1 = std::chrono::steady_clock::now();
    if (i >= warmup) {
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  return ms;
}

}  // namespace

json run_bench(dataset_snapshot const& s, bench_options const& opt) {
  workload_gen gen{s, opt.seed};
  std::vector<prism> origins, destinations;
  std::vector<event_kind> kinds;
  std::vector<recurrence_pattern> patterns;
  for (auto i = std::size_t{0}; i != opt.cases; ++i) {
    origins.push_back(gen.random_prism());
    destinations.push_back(gen.random_prism());
    kinds.push_back(gen.random_kind());
    patterns.push_back(gen.random_recurrence());
  }
  auto const span = s.interval();
  auto const g = granularity_for(span);

  auto volatile sink = std::size_t{0};
  auto ops = json::object();
  for (auto const& op : opt.operations) {
    std::vector<double> ms;
    if (op == "prism") {
      ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
        sink = sink + eval_prism(s, origins[k], kinds[k]).count();
      });
    } else if (op == "directional") {
      ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
        query_spec q{0, directional_query{origins[k], destinations[k], {}}, std::nullopt, 0, true};
        sink = sink + eval_query(s, q).count();
      });
    } else if (op == "recurrence") {
      ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
        query_spec q{0, atomic_query{origins[k], kinds[k]}, patterns[k], 0, true};
        sink = sink + eval_query(s, q).count();
      });
    } else if (op == "stats" || op == "timeseries") {
      std::vector<result_mask> masks;
      for (auto k = std::size_t{0}; k != opt.cases; ++k) {
        masks.push_back(eval_prism(s, origins[k], kinds[k]));
      }
      if (op == "stats") {
        ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
          sink = sink + compute_stats(s, masks[k]).count;
        });
      } else {
        ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
          sink = sink + time_series(s, masks[k], span, g, measure::count(), kinds[k])
                            .values.size();
        });
      }
    } else if (op == "pipeline") {
      ms = time_runs(opt.warmup, opt.repeat, opt.cases, [&](std::size_t const k) {
        auto const m = eval_prism(s, origins[k], kinds[k]);
        sink = sink + compute_stats(s, m).count;
        sink = sink + time_series(s, m, span, g, measure::count(), kinds[k]).values.size();
      });
    } else {
      throw schema_error{"unknown bench operation \"" + op + "\""};
    }
    auto const sum = summarize(ms);
    ops[op] = {{"samples", sum.samples},
               {"p50_ms", sum.p50_ms},
               {"p95_ms", sum.p95_ms},
               {"mean_ms", sum.mean_ms},
               {"max_ms", sum.max_ms}};
  }
  return {{"schema", "odcube-bench/1"},
          {"trips", s.size()},
          {"cases", opt.cases},
          {"repeat", opt.repeat},
          {"warmup", opt.warmup},
          {"seed", opt.seed},
          {"operations", ops}};
}

}  // namespace odcube
