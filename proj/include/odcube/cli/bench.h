#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "odcube/ingest/snapshot.h"

namespace odcube {

// Operation classes: prism, directional, recurrence, stats, timeseries,
// pipeline (prism eval + stats + one time series).
struct bench_options {
  std::vector<std::string> operations{"prism",  "directional", "recurrence",
                                      "stats",  "timeseries",  "pipeline"};
  std::size_t cases{16};   // distinct random queries per class
  std::size_t repeat{50};  // measured iterations per class
  std::size_t warmup{5};   // discarded iterations per class
  std::uint64_t seed{1};

  // {"operations": [...], "cases": n, "repeat": k, "warmup": w, "seed": s};
  // missing keys keep the defaults. Throws schema_error.
  static bench_options from_json(nlohmann::json const& j);
};

struct latency_summary {
  std::size_t samples{};
  double p50_ms{};
  double p95_ms{};
  double mean_ms{};
  double max_ms{};
};

// Nearest-rank percentile of unsorted samples; q in (0, 1].
double percentile(std::vector<double> samples, double q);
latency_summary summarize(std::vector<double> const& samples_ms);

// {"schema": "odcube-bench/1", "trips": n, "repeat": k, "warmup": w,
//  "operations": {class: {"samples", "p50_ms", "p95_ms", "mean_ms", "max_ms"}}}
nlohmann::json run_bench(dataset_snapshot const& s, bench_options const& opt);

}  // namespace odcube
