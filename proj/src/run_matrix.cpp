#include "streamsim/run_matrix.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace streamsim {
namespace {

std::string cap_label(double cap_mbps) {
  if (cap_mbps <= 0.0) return "base";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", cap_mbps);
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Throughput-weighted latency means across apps; throughput and delivery
// summed. Good enough for single-app scenarios and honest for multi-app.
struct CellSummary {
  double tput = 0.0, deliv = 0.0;
  double lat_mean = 0.0, lat_p50 = 0.0, lat_p99 = 0.0;
  double util = 0.0, jain = 1.0;
};

CellSummary summarize(const MetricsReport& r) {
  CellSummary s;
  double w = 0.0;
  for (const AppMetrics& a : r.apps) {
    s.tput += a.mean_throughput_tps;
    s.deliv += a.mean_delivered_mb_s;
    s.lat_mean += a.mean_throughput_tps * a.latency_mean_s;
    s.lat_p50 += a.mean_throughput_tps * a.latency_p50_s;
    s.lat_p99 += a.mean_throughput_tps * a.latency_p99_s;
    w += a.mean_throughput_tps;
  }
  if (w > 0.0) {
    s.lat_mean /= w;
    s.lat_p50 /= w;
    s.lat_p99 /= w;
  }
  s.util = r.mean_bottleneck_utilization;
  s.jain = r.jain;
  return s;
}

}  // namespace

std::vector<RunCell> run_matrix(const Scenario& sc, const RunMatrixConfig& mc) {
  std::vector<double> caps;
  if (mc.sweep && !sc.sweep.capacities_mbps.empty())
    caps = sc.sweep.capacities_mbps;
  else
    caps.push_back(0.0);

  std::vector<RunCell> cells;
  for (double cap : caps) {
    for (AllocatorChoice alloc : mc.allocators) {
      RunCell c;
      c.scenario = sc.name;
      c.allocator = alloc;
      c.cap_mbps = cap;
      c.out_dir = mc.out_root + "/" + sc.name + "__" + allocator_name(alloc) +
                  "__" + cap_label(cap);
      try {
        SimSetup setup = make_setup(sc, cap);
        SimConfig cfg = sc.sim;
        cfg.allocator = alloc;
        c.report = run_simulation(setup, cfg, c.out_dir);
        c.ok = true;
      } catch (const std::exception& e) {
        c.ok = false;
        c.error = e.what();
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::string comparison_table_csv(const std::vector<RunCell>& cells) {
  std::string out =
      "scenario,cap_mbps,allocator,status,throughput_tps,delivered_mb_s,"
      "latency_mean_s,latency_p50_s,latency_p99_s,bottleneck_util,jain\n";
  for (const RunCell& c : cells) {
    out += c.scenario + "," + cap_label(c.cap_mbps) + "," +
           allocator_name(c.allocator) + ",";
    if (!c.ok) {
      out += "error,,,,,,,\n";
      continue;
    }
    const CellSummary s = summarize(c.report);
    out += "ok," + fmt(s.tput) + "," + fmt(s.deliv) + "," + fmt(s.lat_mean) +
           "," + fmt(s.lat_p50) + "," + fmt(s.lat_p99) + "," + fmt(s.util) +
           "," + fmt(s.jain) + "\n";
  }
  // relative change of the app-aware engine against the max-min baseline,
  // emitted only when both cells of a capacity finished
  std::map<std::string, const RunCell*> by_key;
  for (const RunCell& c : cells)
    by_key[cap_label(c.cap_mbps) + "/" + allocator_name(c.allocator)] = &c;
  for (const RunCell& c : cells) {
    if (c.allocator != AllocatorChoice::app_aware || !c.ok) continue;
    auto it = by_key.find(cap_label(c.cap_mbps) + "/maxmin_tcp");
    if (it == by_key.end() || !it->second->ok) continue;
    const CellSummary a = summarize(c.report);
    const CellSummary b = summarize(it->second->report);
    if (b.tput <= 0.0 || b.lat_mean <= 0.0) continue;
    out += c.scenario + "," + cap_label(c.cap_mbps) +
           ",app_aware_vs_maxmin_tcp,delta," +
           fmt((a.tput - b.tput) / b.tput) + "," +
           fmt(b.deliv > 0.0 ? (a.deliv - b.deliv) / b.deliv : 0.0) + "," +
           fmt((a.lat_mean - b.lat_mean) / b.lat_mean) + "," +
           fmt(b.lat_p50 > 0.0 ? (a.lat_p50 - b.lat_p50) / b.lat_p50 : 0.0) +
           "," +
           fmt(b.lat_p99 > 0.0 ? (a.lat_p99 - b.lat_p99) / b.lat_p99 : 0.0) +
           "," + fmt(b.util > 0.0 ? (a.util - b.util) / b.util : 0.0) + "," +
           fmt(b.jain > 0.0 ? (a.jain - b.jain) / b.jain : 0.0) + "\n";
  }
  return out;
}

std::string comparison_table_text(const std::vector<RunCell>& cells) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-6s %-12s %-8s %10s %11s %11s %11s %11s %6s %6s\n",
                "scenario", "cap", "allocator", "status", "tput_tps",
                "deliv_mb_s", "lat_mean_s", "lat_p50_s", "lat_p99_s", "util",
                "jain");
  out += line;
  for (const RunCell& c : cells) {
    if (!c.ok) {
      std::snprintf(line, sizeof(line), "%-16s %-6s %-12s %-8s  %s\n",
                    c.scenario.c_str(), cap_label(c.cap_mbps).c_str(),
                    allocator_name(c.allocator), "error", c.error.c_str());
      out += line;
      continue;
    }
    const CellSummary s = summarize(c.report);
    std::snprintf(line, sizeof(line),
                  "%-16s %-6s %-12s %-8s %10.4g %11.4g %11.4g %11.4g %11.4g "
                  "%6.3f %6.3f\n",
                  c.scenario.c_str(), cap_label(c.cap_mbps).c_str(),
                  allocator_name(c.allocator), "ok", s.tput, s.deliv,
                  s.lat_mean, s.lat_p50, s.lat_p99, s.util, s.jain);
    out += line;
  }
  return out;
}

void write_comparison(const std::vector<RunCell>& cells,
                      const std::string& out_root) {
  std::filesystem::create_directories(out_root);
  std::ofstream csv(out_root + "/comparison.csv");
  csv << comparison_table_csv(cells);
  std::ofstream txt(out_root + "/comparison.txt");
  txt << comparison_table_text(cells);
}

bool all_cells_ok(const std::vector<RunCell>& cells) {
  for (const RunCell& c : cells)
    if (!c.ok) return false;
  return true;
}

}  // namespace streamsim
