#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "odcube/cli/bench.h"
#include "odcube/cli/script.h"
#include "odcube/core/error.h"
#include "odcube/ingest/csv_loader.h"
#include "odcube/ingest/neighborhoods.h"
#include "odcube/ingest/snapshot_io.h"
#include "odcube/service/server.h"
#include "odcube/synth/synthetic.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace odcube;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string read_file(fs::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{"cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(fs::path const& p, std::string const& content) {
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  if (!out) {
    throw error{"cannot write " + p.string()};
  }
  out << content;
}

json read_json(fs::path const& p) {
  try {
    return json::parse(read_file(p));
  } catch (json::parse_error const& e) {
    throw schema_error{p.string() + ": " + e.what()};
  }
}

neighborhood_set load_regions(std::string const& path) {
  if (path.empty()) {
    return {};
  }
  auto r = load_neighborhoods(path);
  for (auto const& w : r.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return std::move(r.set);
}

struct ingest_args {
  std::string csv, map, out, report, reject{"drop"};
  std::size_t grid{0};
};

int cmd_ingest(ingest_args const& a) {
  auto const map = a.map.empty() ? column_map::canonical() : column_map::from_json(read_json(a.map));
  auto const policy = a.reject == "fail" ? reject_policy::fail : reject_policy::drop;
  auto const result = load_trips(a.csv, map, policy, a.grid);
  write_snapshot(a.out, *result.snapshot);
  auto const report = result.report.to_json().dump(2) + "\n";
  if (a.report.empty()) {
    std::cout << report;
  } else {
    write_file(a.report, report);
  }
  return kExitOk;
}

struct query_args {
  std::string snapshot, script, export_dir{"export"}, neighborhoods;
};

int cmd_query(query_args const& a) {
  auto const snap = read_snapshot(a.snapshot);
  auto const out = run_script(snap, read_json(a.script), load_regions(a.neighborhoods));
  write_outputs(out, a.export_dir);
  for (auto const& w : out.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return kExitOk;
}

struct bench_args {
  std::string snapshot, workload, out;
  std::optional<std::size_t> repeat, warmup;
};

int cmd_bench(bench_args const& a) {
  auto const snap = read_snapshot(a.snapshot);
  auto opt = bench_options{};
  if (!a.workload.empty() && a.workload != "default") {
    opt = bench_options::from_json(read_json(a.workload));
  }
  if (a.repeat) {
    opt.repeat = *a.repeat;
  }
  if (a.warmup) {
    opt.warmup = *a.warmup;
  }
  auto const report = run_bench(*snap, opt).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << report;
  } else {
    write_file(a.out, report);
  }
  return kExitOk;
}

struct serve_args {
  std::string snapshot, host{"127.0.0.1"}, neighborhoods;
  int port{8080};
};

int cmd_serve(serve_args const& a) {
  // Block the termination signals before any thread starts so that only
  // sigwait below sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGINT);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  server srv{{a.host, a.port, default_data_dir()}};
  if (!a.snapshot.empty()) {
    srv.add_dataset(read_snapshot(a.snapshot), load_regions(a.neighborhoods));
  }
  auto const port = srv.bind();
  std::cout << "listening on " << a.host << ":" << port << std::endl;
  std::thread http{[&] { srv.run(); }};
  int sig = 0;
  sigwait(&set, &sig);
  std::cerr << "signal " << sig << ", shutting down\n";
  srv.stop();
  http.join();
  return kExitOk;
}

struct synth_args {
  synth_options opt;
  std::string out;
};

int cmd_synth(synth_args const& a) {
  auto const trips = synthesize_trips(a.opt);
  auto const csv = trips_to_csv(trips, time_zone::load(a.opt.timezone));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out, csv);
  }
  return kExitOk;
}

struct sample_args {
  std::string snapshot, out;
  std::size_t k{0};
  std::uint64_t seed{1};
};

int cmd_sample(sample_args const& a) {
  auto const snap = read_snapshot(a.snapshot);
  write_snapshot(a.out, sample(*snap, a.k, a.seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odcube: spatio-temporal origin-destination trip queries"};
  app.require_subcommand(1);

  ingest_args ia;
  auto* ingest = app.add_subcommand("ingest", "CSV -> snapshot file");
  ingest->add_option("csv", ia.csv, "trip CSV")->required();
  ingest->add_option("--map", ia.map, "column map JSON (default: canonical names)");
  ingest->add_option("--out", ia.out, "snapshot output path")->required();
  ingest->add_option("--report", ia.report, "write the ingest report here instead of stdout");
  ingest->add_option("--reject", ia.reject, "bad rows: drop or fail")
      ->check(CLI::IsMember({"drop", "fail"}));
  ingest->add_option("--grid-cells", ia.grid, "target grid cell count (0 = auto)");

  query_args qa;
  auto* query = app.add_subcommand("query", "replay a query script and export results");
  query->add_option("snapshot", qa.snapshot)->required();
  query->add_option("--script", qa.script, "script JSON")->required();
  query->add_option("--export", qa.export_dir, "output directory");
  query->add_option("--neighborhoods", qa.neighborhoods, "GeoJSON regions");

  bench_args ba;
  auto* bench = app.add_subcommand("bench", "latency benchmark");
  bench->add_option("snapshot", ba.snapshot)->required();
  bench->add_option("--workload", ba.workload, "workload JSON or \"default\"");
  bench->add_option("--repeat", ba.repeat, "measured iterations per operation");
  bench->add_option("--warmup", ba.warmup, "discarded iterations per operation");
  bench->add_option("--out", ba.out, "report path (default stdout)");

  serve_args sa;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("snapshot", sa.snapshot, "snapshot to load at start");
  serve->add_option("--port", sa.port, "port (0 = any free port)");
  serve->add_option("--host", sa.host);
  serve->add_option("--neighborhoods", sa.neighborhoods, "GeoJSON regions");

  synth_args ya;
  auto* synth = app.add_subcommand("synth", "write a synthetic trip CSV");
  synth->add_option("--trips", ya.opt.trips);
  synth->add_option("--seed", ya.opt.seed);
  synth->add_option("--days", ya.opt.days);
  synth->add_option("--start", ya.opt.start, "UTC epoch seconds");
  synth->add_option("--timezone", ya.opt.timezone);
  synth->add_option("--out", ya.out, "CSV path (default stdout)");

  sample_args pa;
  auto* samp = app.add_subcommand("sample", "uniform subsample of a snapshot");
  samp->add_option("snapshot", pa.snapshot)->required();
  samp->add_option("-k,--count", pa.k)->required();
  samp->add_option("--seed", pa.seed);
  samp->add_option("--out", pa.out)->required();

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    auto const code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(ia);
    if (*query) return cmd_query(qa);
    if (*bench) return cmd_bench(ba);
    if (*serve) return cmd_serve(sa);
    if (*synth) return cmd_synth(ya);
    if (*samp) return cmd_sample(pa);
  } catch (schema_error const& e) {
    std::cerr << "SchemaError: " << e.what() << "\n";
    return kExitUsage;
  } catch (config_error const& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return kExitUsage;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
