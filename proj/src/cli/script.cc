#include "odcube/cli/script.h"

#include <fstream>

#include "odcube/aggregation/aggregates.h"
#include "odcube/core/error.h"
#include "odcube/query/query_json.h"
#include "odcube/query/query_manager.h"

namespace odcube {

using nlohmann::json;

namespace {

class runner {
public:
  runner(snapshot_ptr s, neighborhood_set const& regions)
      : manager_{std::move(s)}, regions_{regions} {}

  void run(json const& commands) {
    auto step = std::size_t{0};
    for (auto const& c : commands) {
      ++step;
      if (!c.is_object() || !c.contains("op")) {
        throw schema_error{"command " + std::to_string(step) + ": needs \"op\""};
      }
      try {
        apply(c);
      } catch (error const& e) {
        rethrow_with_step(e, step);
      }
      for (auto& w : manager_.take_warnings()) {
        out_.warnings.push_back("command " + std::to_string(step) + ": " + w);
      }
    }
    finish();
  }

  script_outputs take() { return std::move(out_); }

private:
  [[noreturn]] static void rethrow_with_step(error const& e, std::size_t const step) {
    auto const msg = "command " + std::to_string(step) + ": " + e.what();
    if (dynamic_cast<not_found_error const*>(&e)) throw not_found_error{msg};
    if (dynamic_cast<schema_error const*>(&e)) throw schema_error{msg};
    if (dynamic_cast<config_error const*>(&e)) throw config_error{msg};
    if (dynamic_cast<parse_error const*>(&e)) throw parse_error{msg};
    if (dynamic_cast<domain_error const*>(&e)) throw domain_error{msg};
    throw error{msg};
  }

  json_context ctx() const { return {&manager_.snapshot(), &regions_}; }

  query_id ref(json const& j) const {
    if (j.is_number_unsigned()) {
      return j.get<query_id>();
    }
    if (j.is_string()) {
      auto const it = names_.find(j.get<std::string>());
      if (it == names_.end()) {
        throw not_found_error{"unknown query name \"" + j.get<std::string>() + "\""};
      }
      return it->second;
    }
    throw schema_error{"query reference must be a name or an id"};
  }

  static json const& field(json const& c, char const* key) {
    auto const it = c.find(key);
    if (it == c.end()) {
      throw schema_error{std::string{"missing \""} + key + "\""};
    }
    return *it;
  }

  void bind(json const& c, query_id const id) {
    if (auto const it = c.find("as"); it != c.end()) {
      names_[it->get<std::string>()] = id;
    }
  }

  void bind_all(json const& c, std::vector<query_id> const& ids) {
    auto const it = c.find("as");
    if (it == c.end()) {
      return;
    }
    if (!it->is_array() || it->size() != ids.size()) {
      throw schema_error{"\"as\" needs one name per restored query"};
    }
    for (auto i = std::size_t{0}; i != ids.size(); ++i) {
      names_[(*it)[i].get<std::string>()] = ids[i];
    }
  }

  void apply(json const& c) {
    auto const op = c["op"].get<std::string>();
    if (op == "create") {
      bind(c, manager_.add(query_spec_from_json(c.value("query", json::object()), ctx())));
    } else if (op == "link") {
      bind(c, manager_.link_directional(ref(field(c, "origin")),
                                        ref(field(c, "destination"))));
    } else if (op == "revert") {
      auto const [a, b] = manager_.revert_directional(ref(field(c, "query")));
      bind_all(c, {a, b});
    } else if (op == "merge") {
      auto const& qs = field(c, "queries");
      if (!qs.is_array() || qs.size() < 2) {
        throw schema_error{"merge needs at least two queries"};
      }
      auto acc = ref(qs[0]);
      for (auto i = std::size_t{1}; i != qs.size(); ++i) {
        acc = manager_.merge(acc, ref(qs[i]));
      }
      bind(c, acc);
    } else if (op == "demerge") {
      bind_all(c, manager_.demerge(ref(field(c, "query"))));
    } else if (op == "recur") {
      auto const& q = c.contains("query") ? c["query"] : json("all");
      std::optional<query_id> target;
      if (!(q.is_string() && q.get<std::string>() == "all")) {
        target = ref(q);
      }
      auto const& r = field(c, "recurrence");
      manager_.apply_recurrence(
          target, r.is_null() ? std::nullopt : std::optional{recurrence_from_json(r)});
    } else if (op == "constrain") {
      std::vector<attribute_constraint> cs;
      for (auto const& x : field(c, "constraints")) {
        cs.push_back(constraint_from_json(x));
      }
      manager_.set_constraints(std::move(cs));
    } else if (op == "set_kind") {
      manager_.set_kind(ref(field(c, "query")),
                        parse_event_kind(field(c, "kind").get<std::string>()));
    } else if (op == "move") {
      std::optional<endpoint> which;
      if (c.contains("endpoint")) {
        auto const e = c["endpoint"].get<std::string>();
        which = (e == "origin" || e == "pickup") ? endpoint::pickup : endpoint::dropoff;
      }
      manager_.move_prism(ref(field(c, "query")), prism_from_json(field(c, "prism"), ctx()),
                          which);
    } else if (op == "visible") {
      manager_.set_visible(ref(field(c, "query")), field(c, "visible").get<bool>());
    } else if (op == "duplicate") {
      bind(c, manager_.duplicate(ref(field(c, "query"))));
    } else if (op == "delete") {
      manager_.remove(ref(field(c, "query")));
    } else if (op == "export") {
      export_aggregates(c);
    } else {
      throw schema_error{"unknown op \"" + op + "\""};
    }
  }

  std::string name_of(query_id const id) const {
    for (auto const& [name, v] : names_) {
      if (v == id) {
        return name;
      }
    }
    return "q" + std::to_string(id);
  }

  void export_aggregates(json const& c) {
    auto const label = field(c, "name").get<std::string>();
    auto const& s = manager_.snapshot();
    auto const& q = c.contains("query") ? c["query"] : json("all");
    result_mask const* mask = manager_.global_mask().get();
    auto default_kind = event_kind::either;
    if (!(q.is_string() && q.get<std::string>() == "all")) {
      auto const id = ref(q);
      mask = manager_.result(id).mask.get();
      auto const& spec = manager_.spec(id);
      if (spec.is_atomic()) {
        default_kind = std::get<atomic_query>(spec.shape).kind;
      } else if (spec.is_directional()) {
        default_kind = event_kind::origin;
      }
    }
    for (auto const& a : c.value("aggregates", json::array())) {
      auto const type = field(a, "type").get<std::string>();
      auto const kind = a.contains("kind")
                            ? parse_event_kind(a["kind"].get<std::string>())
                            : default_kind;
      auto const span = a.contains("span")
                            ? make_interval(time_from_json(a["span"].at(0), s.zone()),
                                            time_from_json(a["span"].at(1), s.zone()))
                            : s.interval();
      if (type == "timeseries") {
        auto const g = a.contains("granularity")
                           ? parse_granularity(a["granularity"].get<std::string>())
                           : granularity_for(span);
        auto const series = time_series(
            s, *mask, span, g, parse_measure(a.value("measure", std::string{"count"})), kind);
        out_.files[label + ".timeseries." + std::string{to_string(series.granularity)} +
                   ".csv"] = to_csv(series);
        for (auto const& w : series.warnings) {
          out_.warnings.push_back(label + ": " + w);
        }
      } else if (type == "histogram") {
        auto const attr = parse_attribute(a.value("attribute", std::string{"fare"}));
        out_.files[label + ".histogram." + std::string{to_string(attr)} + ".csv"] =
            to_csv(histogram(s, *mask, attr, a.value("bins", std::size_t{20})));
      } else if (type == "choropleth") {
        out_.files[label + ".choropleth.csv"] = to_csv(choropleth(s, *mask, regions_, kind));
      } else if (type == "stack") {
        auto const name = field(a, "neighborhood").get<std::string>();
        out_.files[label + ".stack." + name + ".csv"] =
            to_csv(choropleth_stack(s, *mask, regions_, name, span, kind));
      } else {
        throw schema_error{"unknown aggregate type \"" + type + "\""};
      }
    }
    auto stats = stats_to_json(compute_stats(s, *mask));
    exports_[label] = std::move(stats);
  }

  void finish() {
    auto stats = json::object();
    auto counts = json::object();
    for (auto const id : manager_.ids()) {
      auto const name = name_of(id);
      auto j = result_to_json(manager_, id);
      stats[name] = std::move(j);
      counts[name] = manager_.result(id).stats.count;
    }
    counts["all"] = manager_.global_mask()->count();
    auto const doc = json{{"queries", stats},
                          {"exports", exports_},
                          {"revision", manager_.revision()},
                          {"warnings", out_.warnings}};
    out_.files["stats.json"] = doc.dump(2) + "\n";
    out_.files["counts.json"] = counts.dump(2) + "\n";
  }

  query_manager manager_;
  neighborhood_set const& regions_;
  std::map<std::string, query_id> names_;
  json exports_ = json::object();
  script_outputs out_;
};

}  // namespace

script_outputs run_script(snapshot_ptr snapshot, json const& script,
                          neighborhood_set const& regions) {
  json const* commands = &script;
  if (script.is_object()) {
    auto const it = script.find("commands");
    if (it == script.end()) {
      throw schema_error{"script object needs \"commands\""};
    }
    commands = &*it;
  }
  if (!commands->is_array()) {
    throw schema_error{"script commands must be an array"};
  }
  if (commands->empty()) {
    return {};
  }
  runner r{std::move(snapshot), regions};
  try {
    r.run(*commands);
  } catch (json::exception const& e) {
    throw schema_error{std::string{"malformed script: "} + e.what()};
  }
  return r.take();
}

void write_outputs(script_outputs const& out, std::filesystem::path const& dir) {
  if (out.files.empty()) {
    return;
  }
  std::filesystem::create_directories(dir);
  for (auto const& [name, content] : out.files) {
    std::ofstream f{dir / name, std::ios::binary | std::ios::trunc};
    if (!f) {
      throw error{"cannot write " + (dir / name).string()};
    }
    f << content;
  }
}

}  // namespace odcube
