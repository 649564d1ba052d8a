#include "odcube/query/query_spec.h"

#include "odcube/core/error.h"

namespace odcube {

std::string_view query_spec::variant_name() const {
  switch (shape.index()) {
    case 0: return "atomic";
    case 1: return "directional";
    default: return "merged";
  }
}

event_kind recurrence_kind(query_spec const& q) {
  if (auto const* a = std::get_if<atomic_query>(&q.shape)) {
    return a->kind;
  }
  return event_kind::origin;
}

result_mask eval_query(dataset_snapshot const& s, query_spec const& q,
                       eval_options const opt,
                       recurrence_pattern const* inherited) {
  auto const apply_patterns = [&](result_mask m, event_kind const kind) {
    for (auto const* p : {q.recurrence ? &*q.recurrence : nullptr, inherited}) {
      if (p != nullptr) {
        m &= eval_recurrence(s, *p, kind);
      }
    }
    return m;
  };

  return std::visit(
      [&](auto const& shape) -> result_mask {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, atomic_query>) {
          return apply_patterns(eval_prism(s, shape.volume, shape.kind, opt),
                                shape.kind);
        } else if constexpr (std::is_same_v<T, directional_query>) {
          auto m = eval_prism(s, shape.origin, event_kind::origin, opt);
          m &= eval_prism(s, shape.destination, event_kind::destination, opt);
          return apply_patterns(std::move(m), event_kind::origin);
        } else {
          if (inherited != nullptr) {
            throw domain_error{"merged queries cannot be nested"};
          }
          result_mask out{s.size()};
          for (auto const& member : shape.members) {
            if (member.is_merged()) {
              throw domain_error{"merged queries cannot be nested"};
            }
            out |= eval_query(s, member, opt,
                              q.recurrence ? &*q.recurrence : nullptr);
          }
          return out;
        }
      },
      q.shape);
}

}  // namespace odcube
