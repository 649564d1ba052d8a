#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "odcube/ingest/neighborhoods.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

// A query script replays a session headlessly. It is either a JSON array of
// commands or {"commands": [...]}; each command is {"op": ..., ...} using the
// same fragments the HTTP service accepts:
//   create     {"query": QuerySpec, "as": name}
//   link       {"origin": ref, "destination": ref, "as": name}
//   revert     {"query": ref, "as": [name, name]}
//   merge      {"queries": [ref, ref, ...], "as": name}
//   demerge    {"query": ref, "as": [name, ...]}
//   recur      {"query": ref | "all", "recurrence": Pattern | null}
//   constrain  {"constraints": [Constraint, ...]}
//   set_kind   {"query": ref, "kind": "origin" | "destination" | "either"}
//   move       {"query": ref, "prism": Prism, "endpoint"?: "origin" | ...}
//   visible    {"query": ref, "visible": bool}
//   duplicate  {"query": ref, "as": name}
//   delete     {"query": ref}
//   export     {"name": label, "query": ref | "all",
//               "aggregates": [{"type": "timeseries" | "histogram" |
//                               "choropleth" | "stack", ...}]}
// A ref is a name bound by "as" or a numeric query id. Exports write
// <label>.timeseries.<granularity>.csv, <label>.histogram.<attribute>.csv,
// <label>.choropleth.csv and <label>.stack.<region>.csv next to stats.json
// and counts.json.
struct script_outputs {
  // file name (relative to the export dir) -> content
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
};

// Throws schema_error for malformed scripts and the engine's errors for
// illegal operations. An empty script yields no files.
script_outputs run_script(snapshot_ptr snapshot, nlohmann::json const& script,
                          neighborhood_set const& regions = {});

void write_outputs(script_outputs const& out, std::filesystem::path const& dir);

}  // namespace odcube
