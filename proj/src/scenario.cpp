#include "streamsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace streamsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) fail("unknown key '" + it.key() + "' in " + where);
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + " is missing required key '" + key + "'");
  return *it;
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, const std::string& where,
              double def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) fail(where + "." + key + " must be a number");
  return it->get<double>();
}

int int_or(const json& j, const char* key, const std::string& where, int def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number_integer()) fail(where + "." + key + " must be an integer");
  return it->get<int>();
}

int int_req(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string str_req(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* key, const std::string& where,
                   const std::string& def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_string()) fail(where + "." + key + " must be a string");
  return it->get<std::string>();
}

bool bool_or(const json& j, const char* key, const std::string& where,
             bool def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_boolean()) fail(where + "." + key + " must be a boolean");
  return it->get<bool>();
}

std::string normalized(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

OperatorKind parse_operator_kind(const std::string& s,
                                 const std::string& where) {
  if (s == "source") return OperatorKind::source;
  if (s == "transform") return OperatorKind::transform;
  if (s == "sink") return OperatorKind::sink;
  fail(where + ": unknown operator kind '" + s + "'");
}

JoinKind parse_join(const std::string& s, const std::string& where) {
  if (s == "none") return JoinKind::none;
  if (s == "zip") return JoinKind::zip;
  if (s == "latest") return JoinKind::latest;
  fail(where + ": unknown join '" + s + "'");
}

GroupingKind parse_grouping(const std::string& s, const std::string& where) {
  if (s == "shuffle") return GroupingKind::shuffle;
  if (s == "key_based") return GroupingKind::key_based;
  if (s == "global") return GroupingKind::global;
  if (s == "all") return GroupingKind::all;
  fail(where + ": unknown grouping '" + s + "'");
}

OperatorSpec parse_operator(const json& j, const std::string& where) {
  check_keys(j, where,
             {"name", "kind", "parallelism", "service_rate", "selectivity",
              "out_tuple_mb", "rate_tps", "tuple_mb", "keys", "zipf_skew",
              "poisson", "window_s", "join", "driver"});
  OperatorSpec op;
  op.name = str_req(j, "name", where);
  op.kind = parse_operator_kind(str_req(j, "kind", where), where);
  op.parallelism = int_or(j, "parallelism", where, 1);
  op.service_rate = num_or(j, "service_rate", where, 0.0);
  op.selectivity = num_or(j, "selectivity", where, 1.0);
  op.out_tuple_size = num_or(j, "out_tuple_mb", where, 0.0);
  op.source_rate = num_or(j, "rate_tps", where, 0.0);
  op.source_tuple_size = num_or(j, "tuple_mb", where, 0.0);
  op.key_count = int_or(j, "keys", where, 1);
  op.key_skew = num_or(j, "zipf_skew", where, 0.0);
  op.poisson = bool_or(j, "poisson", where, true);
  op.window_s = num_or(j, "window_s", where, 0.0);
  op.join = parse_join(str_or(j, "join", where, "none"), where);
  op.join_driver = str_or(j, "driver", where, "");
  return op;
}

AppSetup parse_app(const json& j, AppId id, const std::string& where) {
  check_keys(j, where, {"name", "operators", "edges", "placement"});
  AppSetup app;
  app.dag.app_id = id;
  app.dag.name = str_req(j, "name", where);
  const json& ops = require(j, "operators", where);
  if (!ops.is_array() || ops.empty())
    fail(where + ".operators must be a non-empty array");
  std::map<std::string, int> by_name;
  for (size_t i = 0; i < ops.size(); ++i) {
    const std::string ow = where + ".operators[" + std::to_string(i) + "]";
    OperatorSpec op = parse_operator(ops[i], ow);
    if (by_name.count(op.name)) fail(ow + ": duplicate operator '" + op.name + "'");
    by_name[op.name] = static_cast<int>(i);
    app.dag.operators.push_back(std::move(op));
  }
  const json& edges = require(j, "edges", where);
  if (!edges.is_array()) fail(where + ".edges must be an array");
  for (size_t i = 0; i < edges.size(); ++i) {
    const std::string ew = where + ".edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    check_keys(je, ew, {"from", "to", "grouping", "keys", "zipf_skew", "target"});
    DagEdge e;
    const std::string from = str_req(je, "from", ew);
    const std::string to = str_req(je, "to", ew);
    auto fi = by_name.find(from);
    if (fi == by_name.end()) fail(ew + ": unknown operator '" + from + "'");
    auto ti = by_name.find(to);
    if (ti == by_name.end()) fail(ew + ": unknown operator '" + to + "'");
    e.upstream = fi->second;
    e.downstream = ti->second;
    e.grouping.kind = parse_grouping(str_or(je, "grouping", ew, "shuffle"), ew);
    e.grouping.key_count = int_or(je, "keys", ew, 1);
    e.grouping.skew = num_or(je, "zipf_skew", ew, 0.0);
    e.grouping.target_index = int_or(je, "target", ew, 0);
    app.dag.edges.push_back(e);
  }
  validate(app.dag);
  app.placement.assign(app.dag.operators.size(), {});
  if (j.contains("placement")) {
    const json& pl = j["placement"];
    if (!pl.is_object()) fail(where + ".placement must be an object");
    for (auto it = pl.begin(); it != pl.end(); ++it) {
      auto oi = by_name.find(it.key());
      if (oi == by_name.end())
        fail(where + ".placement: unknown operator '" + it.key() + "'");
      if (!it->is_array())
        fail(where + ".placement." + it.key() + " must be an array");
      std::vector<MachineId> ms;
      for (const json& v : *it) {
        if (!v.is_number_integer())
          fail(where + ".placement." + it.key() + " must hold machine ids");
        ms.push_back(v.get<MachineId>());
      }
      app.placement[oi->second] = std::move(ms);
    }
    for (size_t i = 0; i < app.placement.size(); ++i)
      if (app.placement[i].empty())
        fail(where + ".placement must cover every operator; missing '" +
             app.dag.operators[i].name + "'");
  }
  return app;
}

}  // namespace

AllocatorChoice parse_allocator(const std::string& s) {
  const std::string n = normalized(s);
  if (n == "app_aware") return AllocatorChoice::app_aware;
  if (n == "maxmin_tcp") return AllocatorChoice::maxmin_tcp;
  if (n == "app_fair") return AllocatorChoice::app_fair;
  fail("unknown allocator '" + s + "'");
}

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("scenario parse error: ") + e.what());
  }
  if (!j.is_object()) fail("scenario root must be an object");
  check_keys(j, "scenario",
             {"name", "topology", "sim", "fairness", "sweep", "apps"});

  Scenario sc;
  sc.name = str_req(j, "name", "scenario");

  if (!j.contains("topology")) fail("scenario is missing section 'topology'");
  const json& jt = j["topology"];
  check_keys(jt, "topology",
             {"racks", "machines_per_rack", "cores", "uplink_mbps",
              "downlink_mbps", "internal_mbps"});
  sc.topo.racks = int_req(jt, "racks", "topology");
  sc.topo.machines_per_rack = int_req(jt, "machines_per_rack", "topology");
  sc.topo.cores = int_or(jt, "cores", "topology", 1);
  sc.topo.uplink_mbps = num(jt, "uplink_mbps", "topology");
  sc.topo.downlink_mbps = num(jt, "downlink_mbps", "topology");
  sc.topo.internal_mbps = num_or(jt, "internal_mbps", "topology",
                                 std::max(sc.topo.uplink_mbps,
                                          sc.topo.downlink_mbps));

  if (!j.contains("sim")) fail("scenario is missing section 'sim'");
  const json& js = j["sim"];
  check_keys(js, "sim",
             {"duration_s", "sample_period_s", "alloc_period_s", "seed",
              "allocator", "warmup_epochs"});
  sc.sim.duration_s = num(js, "duration_s", "sim");
  sc.sim.sample_period_s = num_or(js, "sample_period_s", "sim", 1.0);
  sc.sim.alloc_period_s = num_or(js, "alloc_period_s", "sim", 5.0);
  if (js.contains("seed")) {
    if (!js["seed"].is_number_integer()) fail("sim.seed must be an integer");
    sc.sim.seed = js["seed"].get<uint64_t>();
  }
  sc.sim.allocator = parse_allocator(str_or(js, "allocator", "sim", "app_aware"));
  sc.sim.warmup_epochs = int_or(js, "warmup_epochs", "sim", 2);

  if (j.contains("fairness")) {
    const json& jf = j["fairness"];
    check_keys(jf, "fairness", {"alpha", "levels", "starvation_epochs"});
    sc.sim.fairness.alpha = num_or(jf, "alpha", "fairness", 0.5);
    sc.sim.fairness.levels = int_or(jf, "levels", "fairness", 8);
    sc.sim.fairness.starvation_epochs =
        int_or(jf, "starvation_epochs", "fairness", 3);
    if (sc.sim.fairness.alpha < 0.0 || sc.sim.fairness.alpha > 1.0)
      fail("fairness.alpha must lie in [0, 1]");
    if (sc.sim.fairness.levels < 1) fail("fairness.levels must be >= 1");
    if (sc.sim.fairness.starvation_epochs < 1)
      fail("fairness.starvation_epochs must be >= 1");
  }

  if (j.contains("sweep")) {
    const json& jw = j["sweep"];
    check_keys(jw, "sweep", {"capacities_mbps", "kinds"});
    if (jw.contains("capacities_mbps")) {
      if (!jw["capacities_mbps"].is_array())
        fail("sweep.capacities_mbps must be an array");
      for (const json& v : jw["capacities_mbps"]) {
        if (!v.is_number() || v.get<double>() <= 0.0)
          fail("sweep.capacities_mbps entries must be positive numbers");
        sc.sweep.capacities_mbps.push_back(v.get<double>());
      }
    }
    if (jw.contains("kinds")) {
      if (!jw["kinds"].is_array()) fail("sweep.kinds must be an array");
      for (const json& v : jw["kinds"]) {
        if (!v.is_string()) fail("sweep.kinds entries must be strings");
        const std::string k = v.get<std::string>();
        if (k == "uplink")
          sc.sweep.uplink = true;
        else if (k == "downlink")
          sc.sweep.downlink = true;
        else if (k == "internal")
          sc.sweep.internal = true;
        else
          fail("sweep.kinds: unknown link class '" + k + "'");
      }
    }
    if (!sc.sweep.capacities_mbps.empty() && !sc.sweep.uplink &&
        !sc.sweep.downlink && !sc.sweep.internal)
      fail("sweep lists capacities but no link kinds");
  }

  if (!j.contains("apps")) fail("scenario is missing section 'apps'");
  const json& ja = j["apps"];
  if (!ja.is_array() || ja.empty())
    fail("scenario.apps must be a non-empty array");
  for (size_t i = 0; i < ja.size(); ++i)
    sc.apps.push_back(parse_app(ja[i], static_cast<AppId>(i),
                                "apps[" + std::to_string(i) + "]"));
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

SimSetup make_setup(const Scenario& sc, double cap_mbps) {
  double up = sc.topo.uplink_mbps;
  double down = sc.topo.downlink_mbps;
  double internal = sc.topo.internal_mbps;
  if (cap_mbps > 0.0) {
    if (sc.sweep.uplink) up = cap_mbps;
    if (sc.sweep.downlink) down = cap_mbps;
    if (sc.sweep.internal) internal = cap_mbps;
  }
  SimSetup setup;
  setup.topo = build_fat_tree(sc.topo.racks, sc.topo.machines_per_rack,
                              sc.topo.cores, mbps_to_mb(up), mbps_to_mb(down),
                              mbps_to_mb(internal));
  setup.apps = sc.apps;
  return setup;
}

}  // namespace streamsim
