#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamsim/run_matrix.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"flow-level simulator of stream-analytics apps on a shared "
               "datacenter fabric"};

  std::string scenario_path;
  std::vector<std::string> allocator_names;
  std::string out_root = "out";
  double duration = 0.0, delta_t = 0.0, sample_dt = 0.0, alpha = -1.0;
  int64_t seed = -1;
  bool sweep = false, table = false;

  cli.add_option("--scenario", scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cli.add_option("--allocator", allocator_names,
                 "allocation engine (repeatable): app-aware, maxmin-tcp, "
                 "app-fair; default: app-aware and maxmin-tcp");
  cli.add_option("--duration", duration, "override run length in seconds");
  cli.add_option("--delta-t", delta_t, "override allocation period in seconds");
  cli.add_option("--sample-dt", sample_dt, "override sample period in seconds");
  cli.add_option("--seed", seed, "override RNG seed");
  cli.add_option("--alpha", alpha, "override fairness EWMA blend in [0, 1]");
  cli.add_option("--out", out_root, "output directory root");
  cli.add_flag("--sweep", sweep, "run every capacity in the scenario sweep");
  cli.add_flag("--table", table, "print the comparison table to stdout");

  CLI11_PARSE(cli, argc, argv);

  try {
    streamsim::Scenario sc = streamsim::load_scenario(scenario_path);
    if (duration > 0.0) sc.sim.duration_s = duration;
    if (delta_t > 0.0) sc.sim.alloc_period_s = delta_t;
    if (sample_dt > 0.0) sc.sim.sample_period_s = sample_dt;
    if (seed >= 0) sc.sim.seed = static_cast<uint64_t>(seed);
    if (alpha >= 0.0) sc.sim.fairness.alpha = alpha;

    streamsim::RunMatrixConfig mc;
    mc.out_root = out_root;
    mc.sweep = sweep;
    if (allocator_names.empty()) {
      mc.allocators = {streamsim::AllocatorChoice::app_aware,
                       streamsim::AllocatorChoice::maxmin_tcp};
    } else {
      for (const std::string& n : allocator_names)
        mc.allocators.push_back(streamsim::parse_allocator(n));
    }

    const auto cells = streamsim::run_matrix(sc, mc);
    streamsim::write_comparison(cells, out_root);
    for (const auto& c : cells) {
      if (c.ok)
        std::printf("ok    %-16s %-12s cap=%-6g -> %s\n", c.scenario.c_str(),
                    streamsim::allocator_name(c.allocator), c.cap_mbps,
                    c.out_dir.c_str());
      else
        std::printf("FAIL  %-16s %-12s cap=%-6g : %s\n", c.scenario.c_str(),
                    streamsim::allocator_name(c.allocator), c.cap_mbps,
                    c.error.c_str());
    }
    if (table) std::fputs(streamsim::comparison_table_text(cells).c_str(), stdout);
    return streamsim::all_cells_ok(cells) ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
