#pragma once

#include <string>
#include <vector>

#include "streamsim/sim_engine.hpp"

namespace streamsim {

struct TopologySpec {
  int racks = 1;
  int machines_per_rack = 2;
  int cores = 1;
  double uplink_mbps = 0.0;
  double downlink_mbps = 0.0;
  double internal_mbps = 0.0;
};

// Optional capacity sweep: each listed value replaces the capacity of the
// selected link classes for one run cell.
struct SweepSpec {
  std::vector<double> capacities_mbps;
  bool uplink = false;
  bool downlink = false;
  bool internal = false;
};

struct Scenario {
  std::string name;
  TopologySpec topo;
  SimConfig sim;
  SweepSpec sweep;
  std::vector<AppSetup> apps;
};

// Accepts underscores or hyphens: app_aware, maxmin-tcp, ...
AllocatorChoice parse_allocator(const std::string& s);

// Strict parser: every unknown key is an error, missing required sections
// are reported by name, application dags are fully validated.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Topology + apps for one sweep point; cap_mbps <= 0 keeps the base
// capacities from the scenario file.
SimSetup make_setup(const Scenario& sc, double cap_mbps = 0.0);

}  // namespace streamsim
