#pragma once

#include <filesystem>
#include <string>

#include "odcube/ingest/snapshot.h"

namespace odcube {

// Binary snapshot file: magic "ODCUBESN", u32 version, zone name, grid
// target, trip count, then the ten columns little-endian. The grid is
// rebuilt on load, so equal snapshots give byte-identical files.
std::string serialize_snapshot(dataset_snapshot const& s);
dataset_snapshot deserialize_snapshot(std::string_view bytes);  // parse_error

void write_snapshot(std::filesystem::path const& path, dataset_snapshot const& s);
snapshot_ptr read_snapshot(std::filesystem::path const& path);

}  // namespace odcube
