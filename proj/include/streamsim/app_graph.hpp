#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamsim/topology.hpp"

namespace streamsim {

using FlowId = int32_t;
using AppId = int32_t;
using InstanceId = int32_t;

enum class OperatorKind { source, transform, sink };

// How an instance combines its inbound flows before emitting.
//   none:   consume tuples independently in arrival order
//   zip:    consume one tuple from every inbound flow per round
//   latest: consume driver tuples, folding reference tuples that carry
//           an emit time at or before the driver tuple's
enum class JoinKind { none, zip, latest };

struct OperatorSpec {
  std::string name;
  int parallelism = 1;
  OperatorKind kind = OperatorKind::transform;
  double service_rate = 0.0;   // tuples/s an instance can consume
  double selectivity = 1.0;    // outputs per input (windowed ops: fold ratio)
  double out_tuple_size = 0.0; // MB (windowed ops: base digest size)

  // Source-only emission parameters.
  double source_rate = 0.0;    // tuples/s
  double source_tuple_size = 0.0;  // MB
  int key_count = 1;
  double key_skew = 0.0;       // Zipf exponent over [1..key_count]
  bool poisson = true;         // false: evenly spaced emissions

  // Windowed aggregation: every window_s seconds emit one digest whose size
  // is out_tuple_size + selectivity * bytes consumed in the window.
  double window_s = 0.0;

  JoinKind join = JoinKind::none;
  std::string join_driver;     // upstream operator feeding the driver edges
};

enum class GroupingKind { shuffle, key_based, global, all };

struct GroupingPolicy {
  GroupingKind kind = GroupingKind::shuffle;
  int key_count = 1;       // key_based
  double skew = 0.0;       // key_based, informational
  int target_index = 0;    // global
};

struct DagEdge {
  int upstream = -1;   // operator index
  int downstream = -1;
  GroupingPolicy grouping;
};

struct AppDag {
  AppId app_id = 0;
  std::string name;
  std::vector<OperatorSpec> operators;
  std::vector<DagEdge> edges;
};

// Throws std::invalid_argument if the DAG is cyclic, disconnected, has a
// grouping target out of range, or an operator violates its role (sources
// with inputs, sinks with outputs, non-positive rates).
void validate(const AppDag& dag);

// Operator indices in a valid processing order (upstream before downstream).
std::vector<int> topological_order(const AppDag& dag);

struct Instance {
  InstanceId id = -1;
  int op = -1;       // operator index in the dag
  int replica = 0;   // 0..parallelism-1
};

struct InstanceEdge {
  int id = -1;
  int dag_edge = -1;  // index into AppDag::edges
  InstanceId src = -1;
  InstanceId dst = -1;
  double share = 0.0;  // expected fraction of upstream output on this edge
};

struct InstanceGraph {
  AppId app_id = 0;
  std::vector<Instance> instances;
  std::vector<InstanceEdge> edges;
};

// Expands operators into parallel instances and dag edges into instance
// edges per grouping policy (shuffle/key_based: full bipartite, global:
// one target, all: full bipartite duplication).
InstanceGraph expand(const AppDag& dag);

struct Placement {
  std::vector<MachineId> machine_of;  // indexed by InstanceId
};

// Instances in operator-declaration order are dealt onto machines in a
// cycle. Throws if the machine list is empty.
Placement place_round_robin(const InstanceGraph& g,
                            const std::vector<MachineId>& machines);

struct Flow {
  FlowId id = -1;
  AppId app_id = 0;
  int instance_edge = -1;
  InstanceId src_instance = -1;
  InstanceId dst_instance = -1;
  MachineId src_machine = -1;
  MachineId dst_machine = -1;
  bool is_internal = false;
  Route route;                    // empty for internal flows
  LinkId uplink = -1;             // first route link (external only)
  LinkId downlink = -1;           // last route link (external only)
  std::vector<LinkId> internal_links;
};

// Per-link member flow lists, indexed by LinkId; internal flows appear in
// no list.
struct LinkFlowSets {
  std::vector<std::vector<FlowId>> members;
};

struct FlowMap {
  std::vector<Flow> flows;
  LinkFlowSets sets;
};

// One flow per instance edge; flows between co-located instances are marked
// internal and excluded from every link set. Flow ids are dense and keep
// instance-edge order. Throws if the placement references a machine outside
// the topology.
FlowMap flow_map(const InstanceGraph& g, const Placement& p,
                 const Topology& topo, AppId app_id = 0,
                 FlowId first_flow_id = 0);

}  // namespace streamsim
