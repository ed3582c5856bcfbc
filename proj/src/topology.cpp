#include "streamsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace streamsim {

const char* link_kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::uplink: return "uplink";
    case LinkKind::downlink: return "downlink";
    case LinkKind::rack_to_core: return "rack_to_core";
    case LinkKind::core_to_rack: return "core_to_rack";
  }
  return "?";
}

LinkId Topology::uplink_of(MachineId m) const {
  if (m < 0 || m >= machine_count())
    throw std::invalid_argument("uplink_of: unknown machine " + std::to_string(m));
  return static_cast<LinkId>(2 * m);
}

LinkId Topology::downlink_of(MachineId m) const {
  if (m < 0 || m >= machine_count())
    throw std::invalid_argument("downlink_of: unknown machine " + std::to_string(m));
  return static_cast<LinkId>(2 * m + 1);
}

const Route& Topology::route(MachineId src, MachineId dst) const {
  const int n = machine_count();
  if (src < 0 || src >= n || dst < 0 || dst >= n)
    throw std::invalid_argument("route: unknown machine id");
  if (src == dst)
    throw std::invalid_argument("route: src == dst has no network path");
  return routes_[static_cast<size_t>(src) * n + dst];
}

Topology build_fat_tree(int rack_count, int machines_per_rack, int core_count,
                        double uplink_cap, double downlink_cap,
                        double internal_cap) {
  if (rack_count < 1 || machines_per_rack < 1 || core_count < 1)
    throw std::invalid_argument("build_fat_tree: all counts must be >= 1");
  if (uplink_cap <= 0 || downlink_cap <= 0 || internal_cap <= 0)
    throw std::invalid_argument("build_fat_tree: capacities must be > 0");

  Topology t;
  t.racks_ = rack_count;
  t.machines_per_rack_ = machines_per_rack;
  t.cores_ = core_count;

  const int machines = rack_count * machines_per_rack;
  const int rack_node0 = machines;            // rack switch node ids
  const int core_node0 = machines + rack_count;  // core switch node ids

  // Per machine: uplink then downlink, so link ids are 2m and 2m+1.
  for (int m = 0; m < machines; m++) {
    const int rack_node = rack_node0 + m / machines_per_rack;
    t.links_.push_back({static_cast<LinkId>(t.links_.size()), LinkKind::uplink,
                        m, rack_node, uplink_cap});
    t.links_.push_back({static_cast<LinkId>(t.links_.size()),
                        LinkKind::downlink, rack_node, m, downlink_cap});
  }

  // rack_to_core[r][c] and core_to_rack[r][c], one pair per (rack, core).
  std::vector<LinkId> r2c(static_cast<size_t>(rack_count) * core_count);
  std::vector<LinkId> c2r(static_cast<size_t>(rack_count) * core_count);
  for (int r = 0; r < rack_count; r++) {
    for (int c = 0; c < core_count; c++) {
      r2c[static_cast<size_t>(r) * core_count + c] =
          static_cast<LinkId>(t.links_.size());
      t.links_.push_back({static_cast<LinkId>(t.links_.size()),
                          LinkKind::rack_to_core, rack_node0 + r, core_node0 + c,
                          internal_cap});
      c2r[static_cast<size_t>(r) * core_count + c] =
          static_cast<LinkId>(t.links_.size());
      t.links_.push_back({static_cast<LinkId>(t.links_.size()),
                          LinkKind::core_to_rack, core_node0 + c, rack_node0 + r,
                          internal_cap});
    }
  }

  t.routes_.resize(static_cast<size_t>(machines) * machines);
  for (int s = 0; s < machines; s++) {
    for (int d = 0; d < machines; d++) {
      if (s == d) continue;
      Route& route = t.routes_[static_cast<size_t>(s) * machines + d];
      route.link_ids.push_back(t.uplink_of(s));
      const int rs = s / machines_per_rack;
      const int rd = d / machines_per_rack;
      if (rs != rd) {
        // Deterministic core pick keeps cross-rack paths reproducible.
        const int core = (s + d) % core_count;
        route.link_ids.push_back(r2c[static_cast<size_t>(rs) * core_count + core]);
        route.link_ids.push_back(c2r[static_cast<size_t>(rd) * core_count + core]);
      }
      route.link_ids.push_back(t.downlink_of(d));
    }
  }
  return t;
}

double allocatable_capacity(const Link& link, double external_traffic_rate) {
  if (external_traffic_rate < 0)
    throw std::invalid_argument("allocatable_capacity: negative external rate");
  return std::max(0.0, link.capacity - external_traffic_rate);
}

}  // namespace streamsim
