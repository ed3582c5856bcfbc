#include "streamsim/fair_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace streamsim {

void ewma_update(AppThroughputRecord& rec, double mu_recent, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("ewma_update: alpha must be in [0, 1]");
  if (mu_recent < 0.0)
    throw std::invalid_argument("ewma_update: negative throughput");
  rec.mu_ewma = alpha * rec.mu_cum + (1.0 - alpha) * mu_recent;
  rec.mu_cum = (rec.mu_cum * rec.intervals + mu_recent) / (rec.intervals + 1);
  rec.mu_recent = mu_recent;
  rec.intervals++;
}

int PriorityGroups::group_of(AppId app) const {
  for (size_t g = 0; g < groups.size(); g++)
    for (AppId a : groups[g])
      if (a == app) return static_cast<int>(g);
  return -1;
}

PriorityGroups group_apps(const std::vector<AppThroughputRecord>& records,
                          int m) {
  if (m < 1) throw std::invalid_argument("group_apps: m must be >= 1");
  std::vector<int> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return records[a].mu_ewma < records[b].mu_ewma;
  });

  PriorityGroups out;
  out.groups.resize(m);
  const int n = static_cast<int>(records.size());
  const int base = n / m, extra = n % m;
  int at = 0;
  for (int g = 0; g < m; g++) {
    const int size = base + (g < extra ? 1 : 0);
    for (int i = 0; i < size; i++)
      out.groups[g].push_back(records[order[at++]].app_id);
  }
  return out;
}

void rotate_for_starvation(PriorityGroups& groups,
                           const std::vector<int>& starved_epochs,
                           const std::vector<AppId>& app_ids, int threshold) {
  for (size_t i = 0; i < app_ids.size(); i++) {
    if (starved_epochs[i] < threshold) continue;
    const int g = groups.group_of(app_ids[i]);
    if (g <= 0) continue;
    auto& from = groups.groups[g];
    from.erase(std::find(from.begin(), from.end(), app_ids[i]));
    groups.groups[g - 1].push_back(app_ids[i]);
  }
}

namespace {

// Max-min split of cap across demands: equal shares, freezing entries at
// their demand and re-offering the remainder.
std::vector<double> water_fill(const std::vector<double>& demand, double cap) {
  const size_t n = demand.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return demand[a] < demand[b]; });
  std::vector<double> x(n, 0.0);
  double rem = cap;
  size_t left = n;
  for (int i : order) {
    const double give = std::min(demand[i], rem / static_cast<double>(left));
    x[i] = give;
    rem -= give;
    left--;
  }
  return x;
}

}  // namespace

std::vector<double> schedule_link(double capacity,
                                  const std::vector<ScheduledFlow>& flows,
                                  const PriorityGroups& groups) {
  if (capacity < 0)
    throw std::invalid_argument("schedule_link: negative capacity");
  std::vector<double> caps(flows.size(), 0.0);
  double remaining = capacity;

  for (const auto& group : groups.groups) {
    if (remaining <= 0) break;
    // Apps from this group present on the link, in group order.
    std::vector<AppId> apps;
    std::vector<double> app_demand;
    for (AppId a : group) {
      double d = 0;
      bool present = false;
      for (const auto& sf : flows) {
        if (sf.app != a) continue;
        present = true;
        d += sf.demand;
      }
      if (present) {
        apps.push_back(a);
        app_demand.push_back(d);
      }
    }
    if (apps.empty()) continue;

    const auto app_grant = water_fill(app_demand, remaining);
    for (size_t ai = 0; ai < apps.size(); ai++) {
      std::vector<size_t> idx;
      std::vector<double> d;
      for (size_t i = 0; i < flows.size(); i++) {
        if (flows[i].app != apps[ai]) continue;
        idx.push_back(i);
        d.push_back(flows[i].demand);
      }
      const auto flow_grant = water_fill(d, app_grant[ai]);
      for (size_t i = 0; i < idx.size(); i++) caps[idx[i]] = flow_grant[i];
      remaining -= app_grant[ai];
    }
  }
  return caps;
}

double jain_index(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("jain_index: empty input");
  double sum = 0, sum_sq = 0;
  for (double v : values) {
    if (v < 0) throw std::invalid_argument("jain_index: negative value");
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0)
    throw std::invalid_argument("jain_index: all-zero input");
  return (sum * sum) / (static_cast<double>(values.size()) * sum_sq);
}

}  // namespace streamsim
