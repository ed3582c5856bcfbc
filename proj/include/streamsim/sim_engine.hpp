#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamsim/allocator.hpp"
#include "streamsim/app_graph.hpp"
#include "streamsim/fair_scheduler.hpp"
#include "streamsim/flow_profiler.hpp"
#include "streamsim/topology.hpp"

namespace streamsim {

enum class AllocatorChoice { app_aware, maxmin_tcp, app_fair };

const char* allocator_name(AllocatorChoice c);

struct FairnessConfig {
  double alpha = 0.5;
  int levels = 8;             // priority groups
  int starvation_epochs = 3;  // consecutive dry epochs before promotion
};

struct SimConfig {
  double duration_s = 600.0;
  double sample_period_s = 1.0;
  double alloc_period_s = 5.0;
  uint64_t seed = 1;
  AllocatorChoice allocator = AllocatorChoice::app_aware;
  int warmup_epochs = 2;  // excluded from summary statistics
  FairnessConfig fairness;
};

// One application: its dag plus an optional per-operator machine pinning
// (replica i of operator k runs on placement[k][i]). All lists empty means
// round-robin placement over every machine.
struct AppSetup {
  AppDag dag;
  std::vector<std::vector<MachineId>> placement;
};

struct SimSetup {
  Topology topo;
  std::vector<AppSetup> apps;
};

struct AppMetrics {
  AppId app_id = 0;
  std::string name;
  double mean_throughput_tps = 0.0;  // tuples completed per second at sinks
  double mean_delivered_mb_s = 0.0;  // MB/s consumed by sinks
  double latency_mean_s = 0.0;
  double latency_p50_s = 0.0;
  double latency_p99_s = 0.0;
  uint64_t emitted = 0;    // source tuples
  uint64_t completed = 0;  // source tuples folded into sink-consumed results
  uint64_t resident = 0;   // still queued/windowed at run end
  int max_zero_run = 0;    // longest streak of dry epochs after warm-up
};

struct LinkMetrics {
  LinkId id = -1;
  LinkKind kind = LinkKind::uplink;
  bool bottlenecked = false;  // flagged in any epoch
  double mean_utilization = 0.0;
};

struct MetricsReport {
  std::vector<AppMetrics> apps;
  std::vector<LinkMetrics> links;
  double mean_bottleneck_utilization = 0.0;  // over flagged links; 0 if none
  bool has_bottleneck_links = false;
  double jain = 1.0;  // over per-app delivered MB/s; 1.0 for a single app
  uint64_t feasibility_violations = 0;
  double max_conservation_residual_mb = 0.0;  // profiler vs queue bookkeeping
  bool tuple_conservation_ok = false;
  int epochs = 0;
  std::vector<std::vector<double>> app_epoch_delivered_mb;  // [app][epoch]
};

// Runs one deterministic simulation. When out_dir is non-empty, writes
// flow_state.csv, allocation.csv, metrics.csv, summary.json (and
// fair_groups.csv under the fairness scheduler) into it. Identical setup,
// config and seed produce byte-identical outputs.
MetricsReport run_simulation(const SimSetup& setup, const SimConfig& cfg,
                             const std::string& out_dir = "");

}  // namespace streamsim
