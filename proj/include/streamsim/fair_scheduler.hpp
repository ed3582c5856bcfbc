#pragma once

#include <vector>

#include "streamsim/app_graph.hpp"

namespace streamsim {

// Throughput history for one application, MB/s.
struct AppThroughputRecord {
  AppId app_id = 0;
  double mu_cum = 0.0;     // running mean since the run began
  double mu_recent = 0.0;  // last interval
  double mu_ewma = 0.0;    // grouping key: alpha*mu_cum + (1-alpha)*mu_recent
  int64_t intervals = 0;   // intervals folded into mu_cum
};

// Blends the running mean with the newest measurement and rolls the mean
// forward. alpha outside [0, 1] is an error.
void ewma_update(AppThroughputRecord& rec, double mu_recent, double alpha);

// groups[0] is the highest-priority (lowest-throughput) level q_1.
struct PriorityGroups {
  std::vector<std::vector<AppId>> groups;

  int group_of(AppId app) const;
};

// Sorts apps ascending by mu_ewma (stable on ties) and cuts the order into
// m contiguous buckets as equal-sized as possible, larger buckets first.
PriorityGroups group_apps(const std::vector<AppThroughputRecord>& records,
                          int m);

// Moves every app whose consecutive zero-allocation count reached the
// threshold one group toward q_1.
void rotate_for_starvation(PriorityGroups& groups,
                           const std::vector<int>& starved_epochs,
                           const std::vector<AppId>& app_ids, int threshold);

struct ScheduledFlow {
  FlowId flow = -1;
  AppId app = 0;
  double demand = 0.0;  // MB/s
};

// Strict-priority split of one link: each group in turn takes what its apps
// demand from the remaining capacity (max-min across apps, i.e. equal split
// with demand freezing), then each app's grant is max-min split across its
// flows. Returns a per-flow cap aligned with `flows`.
std::vector<double> schedule_link(double capacity,
                                  const std::vector<ScheduledFlow>& flows,
                                  const PriorityGroups& groups);

// (sum x)^2 / (n * sum x^2). Throws on an empty or all-zero input.
double jain_index(const std::vector<double>& values);

}  // namespace streamsim
