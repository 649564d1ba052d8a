#include "fixtures.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

#include "absl/time/civil_time.h"
#include "absl/time/time.h"

#include "odcube/core/geo.h"

namespace fixture {

odcube::plane_point ll(double const lon, double const lat) {
  return odcube::project({lon, lat});
}

std::int64_t local(std::string const& civil, std::string const& tz) {
  absl::CivilSecond cs;
  if (!absl::ParseCivilTime(civil.substr(0, 10) + "T" + civil.substr(11), &cs)) {
    throw std::runtime_error{"bad civil time " + civil};
  }
  absl::TimeZone zone;
  if (!absl::LoadTimeZone(tz, &zone)) {
    throw std::runtime_error{"bad zone " + tz};
  }
  return absl::ToUnixSeconds(absl::FromCivil(cs, zone));
}

odcube::trip_record trip(odcube::plane_point const from, std::int64_t const pickup,
                         odcube::plane_point const to, std::int64_t const dropoff,
                         double const fare, double const distance,
                         double const passengers) {
  return {{pickup},   {dropoff}, from,       to,
          static_cast<double>(dropoff - pickup), distance, fare, passengers};
}

odcube::snapshot_ptr snapshot_of(std::vector<odcube::trip_record> const& trips,
                                 std::string const& tz) {
  odcube::trip_columns c;
  for (auto const& t : trips) {
    c.push_back(t);
  }
  return std::make_shared<odcube::dataset_snapshot const>(std::move(c), tz);
}

std::filesystem::path source_dir() { return ODCUBE_FIXTURE_DIR; }

std::filesystem::path temp_dir(std::string const& name) {
  auto const p = std::filesystem::temp_directory_path() / ("odcube-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_file(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw std::runtime_error{"cannot read " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(std::filesystem::path const& p, std::string const& content) {
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  out << content;
}

int run(std::string const& command) {
  auto const status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) {
    return -1;
  }
  return WEXITSTATUS(status);
}

std::string cli() { return ODCUBE_CLI_PATH; }

int replay_scenario(std::string const& name, std::string const& csv,
                    std::filesystem::path const& dir) {
  write_file(dir / "trips.csv", csv);
  auto const q = [](std::filesystem::path const& p) { return "'" + p.string() + "'"; };
  if (auto const rc = run(cli() + " ingest " + q(dir / "trips.csv") + " --out " +
                          q(dir / "trips.snap") + " --report " + q(dir / "report.json") + " >/dev/null 2>&1");
      rc != 0) {
    return rc;
  }
  return run(cli() + " query " + q(dir / "trips.snap") + " --script " +
             q(source_dir() / "scenarios" / (name + ".json")) + " --export " +
             q(dir / "out") + " >/dev/null 2>&1");
}

}  // namespace fixture
