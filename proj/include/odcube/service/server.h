#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"

#include "odcube/ingest/neighborhoods.h"
#include "odcube/ingest/snapshot.h"
#include "odcube/service/session.h"

namespace odcube {

struct server_options {
  std::string host{"127.0.0.1"};
  int port{8080};  // 0 picks a free port
  std::filesystem::path data_dir{"."};
};

// ODCUBE_DATA_DIR when set, else the working directory.
std::filesystem::path default_data_dir();

// HTTP front end. Routes:
//   GET  /health
//   GET  /datasets, POST /datasets, GET /datasets/{id}
//   GET|POST /queries, GET|PATCH|DELETE /queries/{id}
//   POST /queries/{id}/{link|revert|merge|demerge|duplicate}
//   POST /recurrence, GET|PUT /constraints
//   GET  /aggregates/{timeseries|histogram|choropleth|stack}
//   POST /session/brush, GET /session/state, GET /session/frame,
//   GET  /session/stream
// Query, session and aggregate routes act on the active dataset (the one
// added last) unless ?dataset=<id> names another.
class server {
public:
  explicit server(server_options opt);
  ~server();
  server(server const&) = delete;
  server& operator=(server const&) = delete;

  // Registers a resident snapshot and makes it active; returns its id.
  std::string add_dataset(snapshot_ptr snapshot, neighborhood_set regions = {},
                          nlohmann::json report = {});
  std::shared_ptr<session> find_session(std::string const& id) const;

  // Binds the listening socket; returns the port. Throws config_error.
  int bind();
  // Serves until stop(). Calls bind() first when needed.
  void run();
  void stop();

private:
  struct impl;
  std::unique_ptr<impl> impl_;
};

}  // namespace odcube
