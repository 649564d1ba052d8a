#include "odcube/query/slices.h"

#include <algorithm>

namespace odcube {

std::vector<time_interval> slice_interval(
    time_interval const interval, std::span<recurrence_pattern const> patterns,
    time_zone const& zone) {
  std::vector<time_interval> out;
  if (interval.empty()) {
    return out;
  }
  auto const from = interval.start.epoch_seconds;
  auto const to = interval.end.epoch_seconds;

  std::vector<time_zone> zones;
  std::vector<std::int64_t> cuts{from};
  for (auto const& p : patterns) {
    p.validate();
    auto const& z = zones.emplace_back(resolve_zone(p, zone));
    for (auto const& seg : z.segments(from, to)) {
      cuts.push_back(seg.start);
    }
    auto const add = [&](std::int64_t const phase) {
      auto const b = z.boundaries(from, to, kSecondsPerDay, phase);
      cuts.insert(end(cuts), begin(b), end(b));
    };
    add(0);
    if (p.hours) {
      add(std::int64_t{p.hours->start} * 60);
      add(std::int64_t{p.hours->end % 1440} * 60);
    }
  }
  std::sort(begin(cuts), end(cuts));
  cuts.erase(std::unique(begin(cuts), end(cuts)), end(cuts));

  // Matching is constant between consecutive cuts.
  for (auto i = std::size_t{0}; i != cuts.size(); ++i) {
    auto const s = cuts[i];
    auto const e = i + 1 == cuts.size() ? to : cuts[i + 1];
    auto match = true;
    for (auto k = std::size_t{0}; k != patterns.size() && match; ++k) {
      match = patterns[k].matches_local(zones[k].to_local(s));
    }
    if (!match) {
      continue;
    }
    if (!out.empty() && out.back().end.epoch_seconds == s) {
      out.back().end = time_stamp{e};
    } else {
      out.push_back({{s}, {e}});
    }
  }
  return out;
}

std::vector<prism_slices> query_slices(dataset_snapshot const& s,
                                       query_spec const& q) {
  std::vector<prism_slices> out;
  auto const emit = [&](std::string role, prism const& p,
                        std::vector<recurrence_pattern> const& patterns) {
    out.push_back({std::move(role), p.interval,
                   slice_interval(p.interval, patterns, s.zone())});
  };
  auto const own = [](query_spec const& spec,
                      std::optional<recurrence_pattern> const& extra) {
    std::vector<recurrence_pattern> ps;
    if (spec.recurrence) {
      ps.push_back(*spec.recurrence);
    }
    if (extra) {
      ps.push_back(*extra);
    }
    return ps;
  };
  std::visit(
      [&](auto const& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, atomic_query>) {
          emit("prism", shape.volume, own(q, std::nullopt));
        } else if constexpr (std::is_same_v<T, directional_query>) {
          emit("origin", shape.origin, own(q, std::nullopt));
          emit("destination", shape.destination, {});
        } else {
          for (auto const& m : shape.members) {
            auto const role = "member:" + std::to_string(m.id);
            if (auto const* a = std::get_if<atomic_query>(&m.shape)) {
              emit(role, a->volume, own(m, q.recurrence));
            } else if (auto const* d = std::get_if<directional_query>(&m.shape)) {
              emit(role, d->origin, own(m, q.recurrence));
            }
          }
        }
      },
      q.shape);
  return out;
}

}  // namespace odcube
