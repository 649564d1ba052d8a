#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "odcube/ingest/snapshot.h"

namespace fixture {

inline constexpr char const* kNewYork = "America/New_York";

odcube::plane_point ll(double lon, double lat);

// "YYYY-MM-DD hh:mm:ss" in tz -> UTC seconds (independent of the engine).
std::int64_t local(std::string const& civil, std::string const& tz = kNewYork);

odcube::trip_record trip(odcube::plane_point from, std::int64_t pickup,
                         odcube::plane_point to, std::int64_t dropoff,
                         double fare = 10.0, double distance = 1.0,
                         double passengers = 1.0);

odcube::snapshot_ptr snapshot_of(std::vector<odcube::trip_record> const& trips,
                                 std::string const& tz = kNewYork);

std::filesystem::path source_dir();  // tests/fixtures
std::filesystem::path temp_dir(std::string const& name);  // fresh, empty
std::string read_file(std::filesystem::path const& p);
void write_file(std::filesystem::path const& p, std::string const& content);

// Exit status of a shell command.
int run(std::string const& command);
std::string cli();  // path of the odcube binary

// Writes `csv` into `dir`, then runs `odcube ingest` and `odcube query` with
// scenarios/<name>.json, exporting into dir/out. Returns the first non-zero
// exit status, or 0.
int replay_scenario(std::string const& name, std::string const& csv,
                    std::filesystem::path const& dir);

}  // namespace fixture
