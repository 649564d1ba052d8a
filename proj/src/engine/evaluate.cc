#include "odcube/engine/evaluate.h"

#include "odcube/core/error.h"

namespace odcube {

namespace {

void eval_endpoint(dataset_snapshot const& s, prism const& p, endpoint const e,
                   eval_options const opt, result_mask& out) {
  auto const times = s.times(e);
  auto const xs = s.xs(e);
  auto const ys = s.ys(e);
  auto const& iv = p.interval;
  auto const test = [&](std::size_t const i) {
    if (!out.test(i) && iv.contains(times[i]) &&
        point_in_polygon({xs[i], ys[i]}, p.footprint)) {
      out.set(i);
    }
  };
  if (iv.empty()) {
    return;
  }
  if (opt.use_index) {
    s.index(e).for_each_candidate_cell(
        p.footprint.bounds(), [&](std::span<std::uint32_t const> ids) {
          for (auto const id : ids) {
            test(id);
          }
        });
  } else {
    for (auto i = std::size_t{0}; i != s.size(); ++i) {
      test(i);
    }
  }
}

void eval_recurrence_endpoint(dataset_snapshot const& s,
                              recurrence_matcher const& matches,
                              endpoint const e, result_mask& out) {
  auto const times = s.times(e);
  for (auto i = std::size_t{0}; i != s.size(); ++i) {
    if (matches(times[i])) {
      out.set(i);
    }
  }
}

}  // namespace

void attribute_constraint::validate() const {
  if (min && max && *min > *max) {
    throw domain_error{"constraint on " + std::string{to_string(attr)} +
                       " has min > max"};
  }
}

void brush_spec::validate() const {
  if (!origin_volume && !destination_volume) {
    throw domain_error{"brush needs at least one volume"};
  }
}

result_mask eval_prism(dataset_snapshot const& s, prism const& p,
                       event_kind const kind, eval_options const opt) {
  result_mask out{s.size()};
  if (kind != event_kind::destination) {
    eval_endpoint(s, p, endpoint::pickup, opt, out);
  }
  if (kind != event_kind::origin) {
    eval_endpoint(s, p, endpoint::dropoff, opt, out);
  }
  return out;
}

result_mask eval_recurrence(dataset_snapshot const& s,
                            recurrence_pattern const& pattern,
                            event_kind const kind) {
  pattern.validate();
  auto const zone = resolve_zone(pattern, s.zone());
  if (pattern.matches_everything()) {
    return result_mask::full(s.size());
  }
  auto const iv = s.interval();
  auto const matcher = recurrence_matcher{pattern, zone, iv.start.epoch_seconds,
                                          iv.end.epoch_seconds};
  result_mask out{s.size()};
  if (kind != event_kind::destination) {
    eval_recurrence_endpoint(s, matcher, endpoint::pickup, out);
  }
  if (kind != event_kind::origin) {
    eval_recurrence_endpoint(s, matcher, endpoint::dropoff, out);
  }
  return out;
}

result_mask eval_attributes(dataset_snapshot const& s,
                            std::span<attribute_constraint const> constraints) {
  auto out = result_mask::full(s.size());
  for (auto const& c : constraints) {
    c.validate();
    if (!c.min && !c.max) {
      continue;
    }
    auto const values = s.attribute_column(c.attr);
    for (auto i = std::size_t{0}; i != s.size(); ++i) {
      if (!c.satisfied_by(values[i])) {
        out.reset(i);
      }
    }
  }
  return out;
}

result_mask eval_brush(dataset_snapshot const& s, brush_spec const& brush,
                       eval_options const opt) {
  brush.validate();
  if (brush.origin_volume && brush.destination_volume) {
    auto m = eval_prism(s, *brush.origin_volume, event_kind::origin, opt);
    m &= eval_prism(s, *brush.destination_volume, event_kind::destination, opt);
    return m;
  }
  if (brush.origin_volume) {
    return eval_prism(s, *brush.origin_volume,
                      brush.single_kind.value_or(event_kind::origin), opt);
  }
  return eval_prism(s, *brush.destination_volume,
                    brush.single_kind.value_or(event_kind::destination), opt);
}

status_vector classify(dataset_snapshot const& s, result_mask const& global,
                       std::span<result_mask const> query_masks,
                       result_mask const* brush) {
  auto const n = s.size();
  auto const check = [n](result_mask const& m) {
    if (m.size() != n) {
      throw domain_error{"classify: mask length does not match trip count"};
    }
  };
  check(global);
  for (auto const& q : query_masks) {
    check(q);
  }
  if (brush != nullptr) {
    check(*brush);
  }

  auto highlighted = result_mask{n};
  for (auto const& q : query_masks) {
    highlighted |= q;
  }

  status_vector out;
  out.points.resize(2 * n);
  for (auto i = std::size_t{0}; i != n; ++i) {
    auto st = point_status::filtered_out;
    if (global.test(i)) {
      if (brush != nullptr && brush->test(i)) {
        st = point_status::brushed;
      } else if (highlighted.test(i)) {
        st = point_status::highlighted;
      } else {
        st = point_status::visible;
      }
    }
    out.points[i] = st;
    out.points[n + i] = st;
  }
  return out;
}

}  // namespace odcube
