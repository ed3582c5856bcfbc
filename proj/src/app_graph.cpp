#include "streamsim/app_graph.hpp"

#include <numeric>
#include <stdexcept>

#include "streamsim/workload.hpp"

namespace streamsim {

static int find_op(const AppDag& dag, const std::string& name) {
  for (size_t i = 0; i < dag.operators.size(); i++)
    if (dag.operators[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> topological_order(const AppDag& dag) {
  const int n = static_cast<int>(dag.operators.size());
  std::vector<int> indegree(n, 0);
  for (const auto& e : dag.edges) indegree[e.downstream]++;
  std::vector<int> order;
  std::vector<int> ready;
  for (int i = 0; i < n; i++)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    int op = ready.front();
    ready.erase(ready.begin());
    order.push_back(op);
    for (const auto& e : dag.edges) {
      if (e.upstream != op) continue;
      if (--indegree[e.downstream] == 0) ready.push_back(e.downstream);
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("dag '" + dag.name + "' contains a cycle");
  return order;
}

void validate(const AppDag& dag) {
  std::vector<std::string> errors;
  const int n = static_cast<int>(dag.operators.size());
  if (n == 0) errors.push_back("dag has no operators");

  for (const auto& op : dag.operators) {
    if (op.parallelism < 1)
      errors.push_back("operator '" + op.name + "': parallelism must be >= 1");
    if (op.kind != OperatorKind::source && op.service_rate <= 0)
      errors.push_back("operator '" + op.name + "': service_rate must be > 0");
    if (op.kind == OperatorKind::source && op.source_rate < 0)
      errors.push_back("operator '" + op.name + "': source rate must be >= 0");
    if (op.join == JoinKind::latest && find_op(dag, op.join_driver) < 0)
      errors.push_back("operator '" + op.name + "': unknown join driver '" +
                       op.join_driver + "'");
  }

  std::vector<int> in_count(n, 0), out_count(n, 0);
  for (const auto& e : dag.edges) {
    if (e.upstream < 0 || e.upstream >= n || e.downstream < 0 ||
        e.downstream >= n) {
      errors.push_back("edge references an unknown operator");
      continue;
    }
    in_count[e.downstream]++;
    out_count[e.upstream]++;
    if (e.grouping.kind == GroupingKind::key_based && e.grouping.key_count < 1)
      errors.push_back("key_based edge into '" +
                       dag.operators[e.downstream].name +
                       "': key_count must be >= 1");
    if (e.grouping.kind == GroupingKind::global) {
      int par = dag.operators[e.downstream].parallelism;
      if (e.grouping.target_index < 0 || e.grouping.target_index >= par)
        errors.push_back("global edge into '" +
                         dag.operators[e.downstream].name +
                         "': target index out of range");
    }
  }

  for (int i = 0; i < n; i++) {
    const auto& op = dag.operators[i];
    if (op.kind == OperatorKind::source && in_count[i] > 0)
      errors.push_back("source '" + op.name + "' has inbound edges");
    if (op.kind != OperatorKind::source && in_count[i] == 0)
      errors.push_back("operator '" + op.name + "' is unreachable (no inputs)");
    if (op.kind == OperatorKind::sink && out_count[i] > 0)
      errors.push_back("sink '" + op.name + "' has outbound edges");
    if (op.kind != OperatorKind::sink && out_count[i] == 0)
      errors.push_back("operator '" + op.name + "' reaches no sink (no outputs)");
  }

  if (errors.empty()) {
    try {
      topological_order(dag);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  if (!errors.empty()) {
    std::string msg = "invalid dag '" + dag.name + "':";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
}

InstanceGraph expand(const AppDag& dag) {
  validate(dag);
  InstanceGraph g;
  g.app_id = dag.app_id;

  std::vector<int> first_instance(dag.operators.size(), 0);
  for (size_t op = 0; op < dag.operators.size(); op++) {
    first_instance[op] = static_cast<int>(g.instances.size());
    for (int r = 0; r < dag.operators[op].parallelism; r++)
      g.instances.push_back(
          {static_cast<InstanceId>(g.instances.size()), static_cast<int>(op), r});
  }

  for (size_t ei = 0; ei < dag.edges.size(); ei++) {
    const auto& e = dag.edges[ei];
    const int up_par = dag.operators[e.upstream].parallelism;
    const int down_par = dag.operators[e.downstream].parallelism;

    // Expected fraction of upstream output per downstream replica.
    std::vector<double> share(down_par, 0.0);
    switch (e.grouping.kind) {
      case GroupingKind::shuffle:
        for (int d = 0; d < down_par; d++) share[d] = 1.0 / down_par;
        break;
      case GroupingKind::key_based: {
        auto masses = zipf_masses(e.grouping.key_count, e.grouping.skew);
        for (int k = 0; k < e.grouping.key_count; k++)
          share[k % down_par] += masses[k];
        break;
      }
      case GroupingKind::global:
        share[e.grouping.target_index] = 1.0;
        break;
      case GroupingKind::all:
        for (int d = 0; d < down_par; d++) share[d] = 1.0;  // duplication
        break;
    }

    for (int u = 0; u < up_par; u++) {
      for (int d = 0; d < down_par; d++) {
        if (e.grouping.kind == GroupingKind::global &&
            d != e.grouping.target_index)
          continue;
        g.edges.push_back({static_cast<int>(g.edges.size()),
                           static_cast<int>(ei),
                           static_cast<InstanceId>(first_instance[e.upstream] + u),
                           static_cast<InstanceId>(first_instance[e.downstream] + d),
                           share[d]});
      }
    }
  }
  return g;
}

Placement place_round_robin(const InstanceGraph& g,
                            const std::vector<MachineId>& machines) {
  if (machines.empty())
    throw std::invalid_argument("place_round_robin: empty machine list");
  Placement p;
  p.machine_of.resize(g.instances.size());
  for (size_t i = 0; i < g.instances.size(); i++)
    p.machine_of[i] = machines[i % machines.size()];
  return p;
}

FlowMap flow_map(const InstanceGraph& g, const Placement& p,
                 const Topology& topo, AppId app_id, FlowId first_flow_id) {
  if (p.machine_of.size() != g.instances.size())
    throw std::invalid_argument("flow_map: placement size mismatch");
  for (MachineId m : p.machine_of)
    if (m < 0 || m >= topo.machine_count())
      throw std::invalid_argument("flow_map: placement references unknown machine " +
                                  std::to_string(m));

  FlowMap fm;
  fm.sets.members.resize(topo.links().size());
  for (const auto& e : g.edges) {
    Flow f;
    f.id = first_flow_id + static_cast<FlowId>(fm.flows.size());
    f.app_id = app_id;
    f.instance_edge = e.id;
    f.src_instance = e.src;
    f.dst_instance = e.dst;
    f.src_machine = p.machine_of[e.src];
    f.dst_machine = p.machine_of[e.dst];
    f.is_internal = (f.src_machine == f.dst_machine);
    if (!f.is_internal) {
      f.route = topo.route(f.src_machine, f.dst_machine);
      f.uplink = f.route.link_ids.front();
      f.downlink = f.route.link_ids.back();
      for (LinkId l : f.route.link_ids) {
        if (is_internal_kind(topo.link(l).kind)) f.internal_links.push_back(l);
        fm.sets.members[l].push_back(f.id);
      }
    }
    fm.flows.push_back(std::move(f));
  }
  return fm;
}

}  // namespace streamsim
