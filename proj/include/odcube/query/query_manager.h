#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "odcube/engine/evaluate.h"
#include "odcube/ingest/snapshot.h"
#include "odcube/query/query_spec.h"
#include "odcube/query/slices.h"
#include "odcube/query/stats.h"

namespace odcube {

struct query_result {
  query_id id{};
  std::shared_ptr<result_mask const> mask;  // includes global constraints
  trip_stats stats;
  std::vector<prism_slices> slices;
};

// Registry of live queries over one snapshot. Not thread-safe: callers
// serialize mutations (see service session). Every successful mutation
// bumps revision().
class query_manager {
public:
  static constexpr std::size_t kDefaultPaletteSize = 12;

  explicit query_manager(snapshot_ptr snapshot,
                         std::size_t palette_size = kDefaultPaletteSize);

  dataset_snapshot const& snapshot() const { return *snapshot_; }
  snapshot_ptr const& shared_snapshot() const { return snapshot_; }

  // Missing footprint -> full extent, missing interval -> dataset interval.
  query_id create_atomic(std::optional<polygon> footprint,
                         std::optional<time_interval> interval,
                         event_kind kind = event_kind::either);
  query_id create_atomic(prism volume, event_kind kind = event_kind::either);
  // Registers a spec built elsewhere (JSON). Ids and colors, including
  // those of nested specs, are reassigned.
  query_id add(query_spec spec);

  // Atomic only; throws domain_error otherwise.
  query_id set_kind(query_id id, event_kind kind);
  // Atomic: replaces the prism. Directional: `which` selects origin or
  // destination (required). Merged: domain_error.
  query_id move_prism(query_id id, prism volume,
                      std::optional<endpoint> which = std::nullopt);

  // Consumes two atomics into one directional query with the origin's color.
  query_id link_directional(query_id origin, query_id destination);
  // Restores the two atomics (original ids, colors, kinds; current prisms).
  std::pair<query_id, query_id> revert_directional(query_id id);

  // Union. Merging with a merged query flattens it. Merging a query with
  // itself is a no-op that appends a warning and returns the id.
  query_id merge(query_id a, query_id b);
  std::vector<query_id> demerge(query_id id);

  // Sets (or with nullopt clears) the recurrence of one query or of all
  // live queries. Throws config_error for unknown zones.
  std::vector<query_id> apply_recurrence(std::optional<query_id> target,
                                         std::optional<recurrence_pattern> pattern);

  query_id duplicate(query_id id);
  void remove(query_id id);
  void set_visible(query_id id, bool visible);

  void set_constraints(std::vector<attribute_constraint> constraints);
  std::vector<attribute_constraint> const& constraints() const {
    return constraints_;
  }
  // AND of all attribute constraints.
  std::shared_ptr<result_mask const> const& global_mask() const {
    return global_mask_;
  }

  bool contains(query_id id) const { return entries_.contains(id); }
  query_spec const& spec(query_id id) const;      // not_found_error
  query_result const& result(query_id id) const;  // not_found_error
  std::vector<query_id> ids() const;               // ascending

  std::uint64_t revision() const { return revision_; }
  std::size_t palette_size() const { return palette_size_; }

  // Drains warnings produced by the last operations.
  std::vector<std::string> take_warnings();

private:
  struct entry {
    query_spec spec;
    query_result result;
  };

  entry& get(query_id id);
  entry const& get(query_id id) const;
  query_id insert(query_spec spec);  // spec.id/color already assigned
  void refresh(entry& e);
  int allocate_color() const;
  // Fresh ids and colors for spec and every nested spec.
  void renumber(query_spec& spec, std::set<int>& used);
  std::set<int> used_colors() const;
  void commit() { ++revision_; }

  snapshot_ptr snapshot_;
  std::size_t palette_size_;
  std::map<query_id, entry> entries_;
  query_id next_id_{1};
  mutable std::size_t cyclic_color_{0};
  std::vector<attribute_constraint> constraints_;
  std::shared_ptr<result_mask const> global_mask_;
  std::uint64_t revision_{0};
  std::vector<std::string> warnings_;
};

}  // namespace odcube
