#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odcube/core/polygon.h"

namespace odcube {

struct neighborhood {
  std::string name;
  polygon shape;  // Web Mercator
};

class neighborhood_set {
public:
  neighborhood_set() = default;
  // Throws schema_error on duplicate names.
  explicit neighborhood_set(std::vector<neighborhood> regions);

  std::size_t size() const { return regions_.size(); }
  bool empty() const { return regions_.empty(); }
  std::vector<neighborhood> const& regions() const { return regions_; }

  // Throws not_found_error.
  std::size_t index_of(std::string_view name) const;
  neighborhood const& find(std::string_view name) const;

  // First region (in set order) containing p. Overlapping regions therefore
  // never count a point twice.
  std::optional<std::size_t> region_of(plane_point p) const;

private:
  std::vector<neighborhood> regions_;
};

struct neighborhood_load_result {
  neighborhood_set set;
  std::vector<std::string> warnings;
};

// GeoJSON FeatureCollection in WGS84. Polygon features keep their exterior
// ring; other geometry types are skipped with a warning. Throws parse_error
// for malformed JSON and schema_error for structural problems / duplicates.
neighborhood_load_result load_neighborhoods(std::filesystem::path const& path,
                                            std::string const& name_key = "name");
neighborhood_load_result parse_neighborhoods(std::string_view geojson,
                                             std::string const& name_key = "name");

}  // namespace odcube
