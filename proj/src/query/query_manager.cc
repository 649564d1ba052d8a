#include "odcube/query/query_manager.h"

#include <algorithm>
#include <set>

#include "odcube/core/error.h"

namespace odcube {

namespace {

void collect_colors(query_spec const& q, std::set<int>& out) {
  out.insert(q.color);
  std::visit(
      [&](auto const& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, directional_query>) {
          for (auto const& s : shape.sources) {
            collect_colors(s, out);
          }
        } else if constexpr (std::is_same_v<T, merged_query>) {
          for (auto const& m : shape.members) {
            collect_colors(m, out);
          }
        }
      },
      q.shape);
}

// Members of `q` as they would appear after flattening into another merge.
std::vector<query_spec> flatten(query_spec const& q) {
  auto const* merged = std::get_if<merged_query>(&q.shape);
  if (merged == nullptr) {
    return {q};
  }
  auto members = merged->members;
  if (q.recurrence) {
    for (auto& m : members) {
      if (!m.recurrence) {
        m.recurrence = q.recurrence;
      } else if (*m.recurrence != *q.recurrence) {
        throw domain_error{
            "cannot flatten merged query " + std::to_string(q.id) +
            ": its recurrence conflicts with member " + std::to_string(m.id)};
      }
    }
  }
  return members;
}

}  // namespace

query_manager::query_manager(snapshot_ptr snapshot, std::size_t const palette_size)
    : snapshot_{std::move(snapshot)},
      palette_size_{std::max<std::size_t>(1, palette_size)},
      global_mask_{std::make_shared<result_mask const>(
          result_mask::full(snapshot_->size()))} {}

query_manager::entry& query_manager::get(query_id const id) {
  auto const it = entries_.find(id);
  if (it == entries_.end()) {
    throw not_found_error{"unknown query " + std::to_string(id)};
  }
  return it->second;
}

query_manager::entry const& query_manager::get(query_id const id) const {
  auto const it = entries_.find(id);
  if (it == entries_.end()) {
    throw not_found_error{"unknown query " + std::to_string(id)};
  }
  return it->second;
}

query_spec const& query_manager::spec(query_id const id) const {
  return get(id).spec;
}

query_result const& query_manager::result(query_id const id) const {
  return get(id).result;
}

std::vector<query_id> query_manager::ids() const {
  std::vector<query_id> out;
  out.reserve(entries_.size());
  for (auto const& [id, _] : entries_) {
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> query_manager::take_warnings() {
  return std::exchange(warnings_, {});
}

int query_manager::allocate_color() const {
  auto const used = used_colors();
  for (auto c = 0; c != static_cast<int>(palette_size_); ++c) {
    if (!used.contains(c)) {
      return c;
    }
  }
  return static_cast<int>(cyclic_color_++ % palette_size_);
}

void query_manager::refresh(entry& e) {
  auto const& s = *snapshot_;
  auto mask = eval_query(s, e.spec);
  mask &= *global_mask_;
  e.result.id = e.spec.id;
  e.result.stats = compute_stats(s, mask);
  e.result.mask = std::make_shared<result_mask const>(std::move(mask));
  e.result.slices = query_slices(s, e.spec);
}

query_id query_manager::insert(query_spec spec) {
  auto const id = spec.id;
  entry e{std::move(spec), {}};
  refresh(e);
  entries_.insert_or_assign(id, std::move(e));
  return id;
}

void query_manager::renumber(query_spec& spec, std::set<int>& used) {
  spec.id = next_id_++;
  auto c = 0;
  while (c < static_cast<int>(palette_size_) && used.contains(c)) {
    ++c;
  }
  spec.color = c < static_cast<int>(palette_size_)
                   ? c
                   : static_cast<int>(cyclic_color_++ % palette_size_);
  used.insert(spec.color);
  std::visit(
      [&](auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, directional_query>) {
          for (auto& src : shape.sources) {
            renumber(src, used);
          }
        } else if constexpr (std::is_same_v<T, merged_query>) {
          for (auto& m : shape.members) {
            if (m.is_merged()) {
              throw domain_error{"merged queries cannot be nested"};
            }
            renumber(m, used);
          }
        }
      },
      spec.shape);
}

std::set<int> query_manager::used_colors() const {
  std::set<int> used;
  for (auto const& [_, e] : entries_) {
    collect_colors(e.spec, used);
  }
  return used;
}

query_id query_manager::create_atomic(std::optional<polygon> footprint,
                                      std::optional<time_interval> interval,
                                      event_kind const kind) {
  auto const& s = *snapshot_;
  return create_atomic(prism{footprint ? std::move(*footprint) : s.full_footprint(),
                             interval ? *interval : s.interval()},
                       kind);
}

query_id query_manager::create_atomic(prism volume, event_kind const kind) {
  auto spec = query_spec{next_id_++, atomic_query{std::move(volume), kind},
                         std::nullopt, allocate_color(), true};
  auto const id = insert(std::move(spec));
  commit();
  return id;
}

query_id query_manager::add(query_spec spec) {
  if (spec.recurrence) {
    spec.recurrence->validate();
    resolve_zone(*spec.recurrence, snapshot_->zone());
  }
  auto used = used_colors();
  renumber(spec, used);
  auto const id = insert(std::move(spec));
  commit();
  return id;
}

query_id query_manager::set_kind(query_id const id, event_kind const kind) {
  auto& e = get(id);
  auto* a = std::get_if<atomic_query>(&e.spec.shape);
  if (a == nullptr) {
    throw domain_error{"set_kind applies to atomic queries only"};
  }
  a->kind = kind;
  refresh(e);
  commit();
  return id;
}

query_id query_manager::move_prism(query_id const id, prism volume,
                                   std::optional<endpoint> const which) {
  auto& e = get(id);
  if (auto* a = std::get_if<atomic_query>(&e.spec.shape)) {
    a->volume = std::move(volume);
  } else if (auto* d = std::get_if<directional_query>(&e.spec.shape)) {
    if (!which) {
      throw domain_error{"moving a directional prism needs an endpoint"};
    }
    (*which == endpoint::pickup ? d->origin : d->destination) = std::move(volume);
  } else {
    throw domain_error{"cannot move the prism of a merged query"};
  }
  refresh(e);
  commit();
  return id;
}

query_id query_manager::link_directional(query_id const origin,
                                         query_id const destination) {
  if (origin == destination) {
    throw domain_error{"cannot link a query to itself"};
  }
  auto const& o = get(origin).spec;
  auto const& d = get(destination).spec;
  auto const* oa = std::get_if<atomic_query>(&o.shape);
  auto const* da = std::get_if<atomic_query>(&d.shape);
  if (oa == nullptr || da == nullptr) {
    throw domain_error{"only atomic queries can be linked directionally"};
  }
  auto spec = query_spec{next_id_++,
                         directional_query{oa->volume, da->volume, {o, d}},
                         o.recurrence, o.color, o.visible};
  entries_.erase(origin);
  entries_.erase(destination);
  auto const id = insert(std::move(spec));
  commit();
  return id;
}

std::pair<query_id, query_id> query_manager::revert_directional(query_id const id) {
  auto const spec = get(id).spec;
  auto const* d = std::get_if<directional_query>(&spec.shape);
  if (d == nullptr) {
    throw domain_error{"query " + std::to_string(id) + " is not directional"};
  }
  entries_.erase(id);
  std::vector<query_spec> restored;
  if (d->sources.size() == 2) {
    restored = d->sources;
    std::get<atomic_query>(restored[0].shape).volume = d->origin;
    std::get<atomic_query>(restored[1].shape).volume = d->destination;
  } else {
    restored.push_back({next_id_++, atomic_query{d->origin, event_kind::origin},
                        spec.recurrence, spec.color, spec.visible});
    auto const second_color = allocate_color();
    restored.push_back({next_id_++,
                        atomic_query{d->destination, event_kind::destination},
                        std::nullopt, second_color, spec.visible});
  }
  auto const a = insert(std::move(restored[0]));
  auto const b = insert(std::move(restored[1]));
  commit();
  return {a, b};
}

query_id query_manager::merge(query_id const a, query_id const b) {
  if (a == b) {
    get(a);
    warnings_.push_back("merge of query " + std::to_string(a) +
                        " with itself ignored");
    return a;
  }
  auto const& qa = get(a).spec;
  auto const& qb = get(b).spec;
  auto members = flatten(qa);
  auto more = flatten(qb);
  members.insert(end(members), std::make_move_iterator(begin(more)),
                 std::make_move_iterator(end(more)));
  auto spec = query_spec{next_id_++, merged_query{std::move(members)},
                         std::nullopt, qa.color, qa.visible || qb.visible};
  entries_.erase(a);
  entries_.erase(b);
  auto const id = insert(std::move(spec));
  commit();
  return id;
}

std::vector<query_id> query_manager::demerge(query_id const id) {
  auto const spec = get(id).spec;
  auto const* m = std::get_if<merged_query>(&spec.shape);
  if (m == nullptr) {
    throw domain_error{"query " + std::to_string(id) + " is not merged"};
  }
  entries_.erase(id);
  std::vector<query_id> out;
  for (auto const& member : m->members) {
    out.push_back(insert(member));
  }
  commit();
  return out;
}

std::vector<query_id> query_manager::apply_recurrence(
    std::optional<query_id> const target,
    std::optional<recurrence_pattern> pattern) {
  if (pattern) {
    pattern->validate();
    resolve_zone(*pattern, snapshot_->zone());
  }
  auto targets = target ? std::vector<query_id>{*target} : ids();
  for (auto const id : targets) {
    get(id);
  }
  for (auto const id : targets) {
    auto& e = get(id);
    e.spec.recurrence = pattern;
    refresh(e);
  }
  commit();
  return targets;
}

query_id query_manager::duplicate(query_id const id) {
  auto copy = get(id).spec;
  auto used = used_colors();
  renumber(copy, used);
  auto const nid = insert(std::move(copy));
  commit();
  return nid;
}

void query_manager::remove(query_id const id) {
  get(id);
  entries_.erase(id);
  commit();
}

void query_manager::set_visible(query_id const id, bool const visible) {
  get(id).spec.visible = visible;
  commit();
}

void query_manager::set_constraints(std::vector<attribute_constraint> constraints) {
  for (auto const& c : constraints) {
    c.validate();
  }
  constraints_ = std::move(constraints);
  global_mask_ = std::make_shared<result_mask const>(
      eval_attributes(*snapshot_, constraints_));
  for (auto& [_, e] : entries_) {
    refresh(e);
  }
  commit();
}

}  // namespace odcube
