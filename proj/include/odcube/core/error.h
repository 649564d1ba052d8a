#pragma once

#include <stdexcept>
#include <string>

namespace odcube {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value outside the domain of an operation (bad latitude, k > n, mask
// length mismatch, illegal query composition).
struct domain_error : error {
  using error::error;
};

// Unknown time zone or otherwise unusable configuration.
struct config_error : error {
  using error::error;
};

// Input does not have the expected columns / fields.
struct schema_error : error {
  using error::error;
};

// Input is syntactically broken (JSON, CSV cell, binary frame).
struct parse_error : error {
  using error::error;
};

struct empty_dataset_error : error {
  using error::error;
};

struct not_found_error : error {
  using error::error;
};

}  // namespace odcube
