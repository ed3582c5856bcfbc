#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace streamsim {

// Bandwidth bookkeeping is done in MB/s internally; config files speak Mbps.
inline double mbps_to_mb(double mbps) { return mbps / 8.0; }
inline double mb_to_mbps(double mb) { return mb * 8.0; }

using MachineId = int32_t;
using LinkId = int32_t;

enum class LinkKind { uplink, downlink, rack_to_core, core_to_rack };

inline bool is_internal_kind(LinkKind k) {
  return k == LinkKind::rack_to_core || k == LinkKind::core_to_rack;
}

const char* link_kind_name(LinkKind k);

// Nodes are numbered machines first, then rack switches, then core switches.
struct Link {
  LinkId id = -1;
  LinkKind kind = LinkKind::uplink;
  int32_t src_node = -1;
  int32_t dst_node = -1;
  double capacity = 0.0;  // MB/s
};

struct Route {
  std::vector<LinkId> link_ids;
};

// Two-tier rack/core fabric. Immutable once built; routes are precomputed
// for every ordered machine pair.
class Topology {
 public:
  int rack_count() const { return racks_; }
  int machines_per_rack() const { return machines_per_rack_; }
  int core_count() const { return cores_; }
  int machine_count() const { return racks_ * machines_per_rack_; }

  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_.at(id); }

  int rack_of(MachineId m) const { return m / machines_per_rack_; }
  LinkId uplink_of(MachineId m) const;
  LinkId downlink_of(MachineId m) const;

  const Route& route(MachineId src, MachineId dst) const;

  friend Topology build_fat_tree(int rack_count, int machines_per_rack,
                                 int core_count, double uplink_cap,
                                 double downlink_cap, double internal_cap);

 private:
  int racks_ = 0;
  int machines_per_rack_ = 0;
  int cores_ = 0;
  std::vector<Link> links_;
  std::vector<Route> routes_;  // indexed src * machine_count + dst
};

// Builds the fabric. Capacities are MB/s. Throws std::invalid_argument on
// non-positive counts or capacities.
Topology build_fat_tree(int rack_count, int machines_per_rack, int core_count,
                        double uplink_cap, double downlink_cap,
                        double internal_cap);

// Capacity left for the allocator once non-managed traffic is subtracted.
double allocatable_capacity(const Link& link, double external_traffic_rate);

}  // namespace streamsim
