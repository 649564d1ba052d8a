#include "odcube/ingest/neighborhoods.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "odcube/core/error.h"

namespace odcube {

neighborhood_set::neighborhood_set(std::vector<neighborhood> regions)
    : regions_{std::move(regions)} {
  std::set<std::string_view> seen;
  for (auto const& r : regions_) {
    if (!seen.insert(r.name).second) {
      throw schema_error{"duplicate neighborhood name \"" + r.name + "\""};
    }
  }
}

std::size_t neighborhood_set::index_of(std::string_view const name) const {
  for (auto i = std::size_t{0}; i != regions_.size(); ++i) {
    if (regions_[i].name == name) {
      return i;
    }
  }
  throw not_found_error{"unknown neighborhood \"" + std::string{name} + "\""};
}

neighborhood const& neighborhood_set::find(std::string_view const name) const {
  return regions_[index_of(name)];
}

std::optional<std::size_t> neighborhood_set::region_of(plane_point const p) const {
  for (auto i = std::size_t{0}; i != regions_.size(); ++i) {
    if (point_in_polygon(p, regions_[i].shape)) {
      return i;
    }
  }
  return std::nullopt;
}

neighborhood_load_result parse_neighborhoods(std::string_view const geojson,
                                             std::string const& name_key) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(geojson);
  } catch (nlohmann::json::parse_error const& e) {
    throw parse_error{std::string{"neighborhood GeoJSON: "} + e.what()};
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw schema_error{"expected a GeoJSON FeatureCollection"};
  }

  neighborhood_load_result out;
  std::vector<neighborhood> regions;
  auto index = std::size_t{0};
  for (auto const& feature : doc["features"]) {
    auto const label = "feature " + std::to_string(index++);
    auto const props = feature.find("properties");
    if (props == feature.end() || !props->is_object() ||
        !props->contains(name_key) || !(*props)[name_key].is_string()) {
      throw schema_error{label + " lacks a string \"" + name_key + "\" property"};
    }
    auto const name = (*props)[name_key].get<std::string>();
    auto const geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) {
      throw schema_error{label + " (" + name + ") has no geometry"};
    }
    auto const type = geom->value("type", "");
    if (type != "Polygon") {
      out.warnings.push_back("skipped " + name + ": unsupported geometry type " +
                             (type.empty() ? std::string{"<none>"} : type));
      continue;
    }
    auto const& rings = (*geom)["coordinates"];
    if (!rings.is_array() || rings.empty() || !rings[0].is_array()) {
      throw schema_error{label + " (" + name + ") has malformed coordinates"};
    }
    if (rings.size() > 1) {
      out.warnings.push_back(name + ": interior rings ignored");
    }
    std::vector<plane_point> ring;
    for (auto const& c : rings[0]) {
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
        throw schema_error{label + " (" + name + ") has a malformed position"};
      }
      ring.push_back(project({c[0].get<double>(), c[1].get<double>()}));
    }
    try {
      regions.push_back({name, polygon{std::move(ring)}});
    } catch (domain_error const& e) {
      throw schema_error{label + " (" + name + "): " + e.what()};
    }
  }
  out.set = neighborhood_set{std::move(regions)};
  return out;
}

neighborhood_load_result load_neighborhoods(std::filesystem::path const& path,
                                            std::string const& name_key) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw error{"cannot open " + path.string()};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_neighborhoods(buf.str(), name_key);
}

}  // namespace odcube
