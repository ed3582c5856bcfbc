#pragma once

#include <string>
#include <vector>

#include "streamsim/scenario.hpp"

namespace streamsim {

struct RunCell {
  std::string scenario;
  AllocatorChoice allocator = AllocatorChoice::app_aware;
  double cap_mbps = 0.0;  // 0: base capacities from the scenario file
  std::string out_dir;
  bool ok = false;
  std::string error;
  MetricsReport report;
};

struct RunMatrixConfig {
  std::vector<AllocatorChoice> allocators;
  std::string out_root = "out";
  bool sweep = false;  // true: one cell per sweep capacity
};

// Runs every allocator x capacity cell; a failing cell records its error and
// the rest still run. Outputs land in <out_root>/<scenario>__<alloc>__<cap>/.
std::vector<RunCell> run_matrix(const Scenario& sc, const RunMatrixConfig& mc);

std::string comparison_table_text(const std::vector<RunCell>& cells);
std::string comparison_table_csv(const std::vector<RunCell>& cells);

// Writes comparison.csv and comparison.txt under out_root.
void write_comparison(const std::vector<RunCell>& cells,
                      const std::string& out_root);

bool all_cells_ok(const std::vector<RunCell>& cells);

}  // namespace streamsim
