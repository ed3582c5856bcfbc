// tests/acceptance_main.cpp — release gate. Each numbered check prints one
// PASS/FAIL line with its measured margin; the process exits non-zero if any
// check fails. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "streamsim/allocator.hpp"
#include "streamsim/run_matrix.hpp"
#include "streamsim/scenario.hpp"
#include "streamsim/workload.hpp"

using namespace streamsim;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void verdict(bool ok, const char* name, const char* fmt, ...) {
  char detail[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(detail, sizeof(detail), fmt, ap);
  va_end(ap);
  std::printf("%s %-28s %s\n", ok ? "PASS:" : "FAIL:", name, detail);
  if (!ok) g_failures++;
}

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

// -------------------------------------------------------------------------
// Hand-rolled network instances for the solver/baseline checks.

struct Inst {
  std::vector<Flow> flows;
  std::vector<LinkKind> kinds;
  std::vector<double> capacity;
  LinkFlowSets sets;
  std::vector<FlowState> states;
  std::vector<double> prior;
  double delta_t = 5.0;

  AllocInputs inputs() const {
    AllocInputs in;
    in.flows = &flows;
    in.sets = &sets;
    in.kinds = &kinds;
    in.capacity = &capacity;
    in.states = &states;
    in.prior_rates = &prior;
    in.delta_t = delta_t;
    return in;
  }
};

Inst make_inst(const std::vector<std::pair<LinkKind, double>>& links,
               const std::vector<std::vector<LinkId>>& routes) {
  Inst inst;
  inst.sets.members.resize(links.size());
  for (const auto& [kind, cap] : links) {
    inst.kinds.push_back(kind);
    inst.capacity.push_back(cap);
  }
  for (size_t i = 0; i < routes.size(); i++) {
    Flow f;
    f.id = static_cast<FlowId>(i);
    f.instance_edge = static_cast<int>(i);
    f.is_internal = routes[i].empty();
    f.route.link_ids = routes[i];
    if (!f.is_internal) {
      f.uplink = routes[i].front();
      f.downlink = routes[i].back();
      for (LinkId l : routes[i]) inst.sets.members[l].push_back(f.id);
    }
    inst.flows.push_back(f);
  }
  inst.states.resize(routes.size());
  inst.prior.assign(routes.size(), 0.0);
  return inst;
}

double unit_open(Rng& rng) { return 1.0 - rng.next_unit(); }  // (0, 1]

// -------------------------------------------------------------------------
// 1. Sender-side solver against reference search.

void check_uplink_oracle() {
  const double t0 = now_s();
  Rng rng(2026);
  double worst_rel = 0.0, worst_ratio = 0.0, worst_sum = 0.0;
  double worst_grid = 0.0;
  const int trials = 600;
  for (int t = 0; t < trials; t++) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    const double cap = 100.0 * unit_open(rng);
    std::vector<double> w(n);
    for (double& v : w) v = 100.0 * unit_open(rng);

    std::vector<double> x = solve_uplink(w, cap);
    const double obj = oracles::uplink_objective(w, x);
    const double ref =
        oracles::uplink_objective(w, oracles::uplink_minimax(w, cap));
    worst_rel = std::max(worst_rel, std::abs(obj - ref) / ref);

    // every flow finishes its pending work at the same moment
    double sum = 0.0;
    for (int i = 0; i < n; i++) {
      worst_ratio = std::max(worst_ratio, std::abs(w[i] / x[i] - obj) / obj);
      sum += x[i];
    }
    worst_sum = std::max(worst_sum, std::abs(sum - cap) / cap);

    // coarse simplex scan (resolution 0.01 * cap) never beats the solver
    if (n == 2) {
      for (int k = 1; k < 100; k++) {
        std::vector<double> g = {cap * 0.01 * k, cap * (1.0 - 0.01 * k)};
        worst_grid = std::max(
            worst_grid, (obj - oracles::uplink_objective(w, g)) / obj);
      }
    } else if (n == 3) {
      for (int k1 = 1; k1 < 99; k1++)
        for (int k2 = 1; k2 < 100 - k1; k2++) {
          std::vector<double> g = {cap * 0.01 * k1, cap * 0.01 * k2,
                                   cap * 0.01 * (100 - k1 - k2)};
          worst_grid = std::max(
              worst_grid, (obj - oracles::uplink_objective(w, g)) / obj);
        }
    }
  }
  const double elapsed = now_s() - t0;
  const bool ok = worst_rel <= 0.01 && worst_ratio <= 1e-9 &&
                  worst_sum <= 1e-9 && worst_grid <= 1e-9 && elapsed < 30.0;
  verdict(ok, "uplink_solver_oracle",
          "%d instances  rel_obj=%.2e  ratio_eq=%.2e  grid_margin=%.2e  "
          "%.1fs",
          trials, worst_rel, worst_ratio, worst_grid, elapsed);
}

// -------------------------------------------------------------------------
// 2. Receiver-side solver against reference search.

void check_downlink_oracle() {
  const double t0 = now_s();
  Rng rng(4052);
  double worst_rel = 0.0, worst_drain = 0.0, worst_sum = 0.0;
  int drops_seen = 0;
  const int trials = 600;
  for (int t = 0; t < trials; t++) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    const double cap = 100.0 * unit_open(rng);
    const double dt = (rng.next_u64() & 1) ? 5.0 : 1.0;
    std::vector<double> L(n), p(n);
    for (double& v : L) v = 100.0 * rng.next_unit();
    for (double& v : p) v = 20.0 * unit_open(rng);
    // last third: one flow arrives with an outsized standing backlog so the
    // water level leaves it dry
    if (t >= 2 * trials / 3 && n >= 2) L[0] = 500.0 + 500.0 * rng.next_unit();

    std::vector<double> x = solve_downlink(L, p, cap, dt);
    const double obj = oracles::downlink_objective(L, p, x, dt);
    const double ref = oracles::downlink_objective(
        L, p, oracles::downlink_minimax(L, p, cap, dt), dt);
    worst_rel = std::max(worst_rel, std::abs(obj - ref) / ref);

    double sum = 0.0, drain_ref = -1.0;
    bool dropped = false;
    for (int i = 0; i < n; i++) {
      sum += x[i];
      if (x[i] <= 0.0) {
        dropped = true;
        continue;
      }
      const double drain = (L[i] + x[i] * dt) / p[i];
      if (drain_ref < 0.0) drain_ref = drain;
      worst_drain = std::max(
          worst_drain, std::abs(drain - drain_ref) / std::max(1.0, drain_ref));
    }
    worst_sum = std::max(worst_sum, std::abs(sum - cap) / cap);
    if (dropped) drops_seen++;
  }
  const double elapsed = now_s() - t0;
  const bool ok = worst_rel <= 0.01 && worst_drain <= 1e-9 &&
                  worst_sum <= 1e-9 && drops_seen >= 50 && elapsed < 60.0;
  verdict(ok, "downlink_solver_oracle",
          "%d instances  rel_obj=%.2e  drain_eq=%.2e  drops=%d  %.1fs",
          trials, worst_rel, worst_drain, drops_seen, elapsed);
}

// -------------------------------------------------------------------------
// 4. Progressive-filling baseline: no pairwise improving move exists.

bool maxmin_optimal(const Inst& inst, const std::vector<double>& demand,
                    const std::vector<double>& x) {
  if (max_link_overshoot(x, inst.sets, inst.capacity) > 1e-9) return false;
  for (const Flow& f : inst.flows) {
    if (f.is_internal) {
      if (x[f.id] != 0.0) return false;
      continue;
    }
    if (x[f.id] < -1e-12 || x[f.id] > demand[f.id] + 1e-9) return false;
    if (x[f.id] >= demand[f.id] - 1e-9) continue;
    bool blocked = false;
    for (LinkId l : f.route.link_ids) {
      double used = 0.0, fastest = 0.0;
      for (FlowId m : inst.sets.members[l]) {
        used += x[m];
        fastest = std::max(fastest, x[m]);
      }
      if (used >= inst.capacity[l] - 1e-6 && x[f.id] >= fastest - 1e-6)
        blocked = true;
    }
    if (!blocked) return false;
  }
  return true;
}

// Every multiset of `n_flows` routes drawn from the non-empty subsets of
// four links, under the given capacity pattern.
int enumerate_catalog(const std::vector<double>& caps, int n_flows,
                      std::vector<std::vector<LinkId>>& routes, int min_subset,
                      int& bad) {
  if (n_flows == 0) {
    std::vector<std::pair<LinkKind, double>> links;
    for (size_t l = 0; l < caps.size(); l++)
      links.push_back({l % 2 ? LinkKind::downlink : LinkKind::uplink,
                       caps[l]});
    Inst inst = make_inst(links, routes);
    std::vector<double> demand(routes.size(), kInf);
    std::vector<double> x =
        maxmin_baseline(inst.flows, inst.sets, inst.capacity, demand);
    if (!maxmin_optimal(inst, demand, x)) bad++;
    return 1;
  }
  int count = 0;
  const int n_subsets = (1 << caps.size()) - 1;
  for (int s = min_subset; s <= n_subsets; s++) {
    std::vector<LinkId> route;
    for (size_t l = 0; l < caps.size(); l++)
      if (s & (1 << l)) route.push_back(static_cast<LinkId>(l));
    routes.push_back(route);
    count += enumerate_catalog(caps, n_flows - 1, routes, s, bad);
    routes.pop_back();
  }
  return count;
}

void check_maxmin_baseline() {
  const double t0 = now_s();
  int bad = 0, catalog = 0;
  for (const auto& caps :
       {std::vector<double>{10, 4, 6, 3}, std::vector<double>{2.5, 1, 5, 2}}) {
    for (int n = 1; n <= 5; n++) {
      std::vector<std::vector<LinkId>> routes;
      catalog += enumerate_catalog(caps, n, routes, 1, bad);
    }
  }

  Rng rng(71);
  int randoms = 0;
  for (int t = 0; t < 200; t++) {
    const int n_links = 1 + static_cast<int>(rng.next_u64() % 4);
    const int n_flows = 1 + static_cast<int>(rng.next_u64() % 5);
    std::vector<std::pair<LinkKind, double>> links;
    for (int l = 0; l < n_links; l++)
      links.push_back({l % 2 ? LinkKind::downlink : LinkKind::uplink,
                       0.5 + 9.5 * unit_open(rng)});
    std::vector<std::vector<LinkId>> routes(n_flows);
    for (auto& r : routes) {
      const int s = 1 + static_cast<int>(rng.next_u64() % ((1 << n_links) - 1));
      for (int l = 0; l < n_links; l++)
        if (s & (1 << l)) r.push_back(l);
    }
    Inst inst = make_inst(links, routes);
    std::vector<double> demand(n_flows);
    for (double& d : demand)
      d = (rng.next_u64() & 1) ? kInf : 3.0 * unit_open(rng);
    std::vector<double> x =
        maxmin_baseline(inst.flows, inst.sets, inst.capacity, demand);
    if (!maxmin_optimal(inst, demand, x)) bad++;
    randoms++;
  }

  Inst canon = make_inst({{LinkKind::uplink, 10.0}, {LinkKind::downlink, 4.0}},
                         {{0}, {0, 1}, {1}});
  std::vector<double> x = maxmin_baseline(canon.flows, canon.sets,
                                          canon.capacity, {kInf, kInf, kInf});
  const bool canon_ok = std::abs(x[0] - 8.0) <= 1e-9 &&
                        std::abs(x[1] - 2.0) <= 1e-9 &&
                        std::abs(x[2] - 2.0) <= 1e-9;

  verdict(bad == 0 && canon_ok, "maxmin_baseline",
          "catalog=%d random=%d suboptimal=%d canonical(8,2,2)=%s  %.1fs",
          catalog, randoms, bad, canon_ok ? "exact" : "WRONG", now_s() - t0);
}

// -------------------------------------------------------------------------
// Scenario matrix shared by the end-to-end checks.

struct CellRun {
  MetricsReport rep;
  double wall_s = 0.0;
};

std::map<std::string, CellRun> g_cells;
double g_worst_cell_s = 0.0;

std::string cell_key(const std::string& scenario, AllocatorChoice alloc,
                     double cap) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s|%s|%g", scenario.c_str(),
                allocator_name(alloc), cap);
  return buf;
}

const MetricsReport& cell(const std::string& scenario, AllocatorChoice alloc,
                          double cap) {
  return g_cells.at(cell_key(scenario, alloc, cap)).rep;
}

std::string scenario_path(const char* file) {
  return std::string(STREAMSIM_SCENARIO_DIR) + "/" + file;
}

void run_cell(const Scenario& sc, AllocatorChoice alloc, double cap,
              double alpha_override = -1.0) {
  SimConfig cfg = sc.sim;
  cfg.allocator = alloc;
  if (alpha_override >= 0.0) cfg.fairness.alpha = alpha_override;
  const double t0 = now_s();
  MetricsReport rep = run_simulation(make_setup(sc, cap), cfg);
  CellRun run{std::move(rep), now_s() - t0};
  g_worst_cell_s = std::max(g_worst_cell_s, run.wall_s);
  std::string key = alpha_override >= 0.0
                        ? cell_key(sc.name + "@a" + std::to_string(alpha_override),
                                   alloc, cap)
                        : cell_key(sc.name, alloc, cap);
  std::printf("  ran %-44s %6.2fs\n", key.c_str(), run.wall_s);
  g_cells.emplace(std::move(key), std::move(run));
}

void run_scenario_matrix() {
  std::printf("-- simulating bundled scenarios --\n");
  for (const char* file :
       {"tt_bottleneck.json", "ti_bottleneck.json", "ti_multihop.json"}) {
    Scenario sc = load_scenario(scenario_path(file));
    for (AllocatorChoice alloc :
         {AllocatorChoice::app_aware, AllocatorChoice::maxmin_tcp})
      for (double cap : sc.sweep.capacities_mbps) run_cell(sc, alloc, cap);
  }
  Scenario fair = load_scenario(scenario_path("fair_5apps.json"));
  run_cell(fair, AllocatorChoice::maxmin_tcp, 0.0);
  for (double alpha : {0.25, 0.5, 0.75, 1.0})
    run_cell(fair, AllocatorChoice::app_fair, 0.0, alpha);
}

// -------------------------------------------------------------------------
// 3 & 12. Feasibility and conservation over every stored run.

void check_feasibility() {
  uint64_t violations = 0;
  for (const auto& [key, run] : g_cells) {
    (void)key;
    violations += run.rep.feasibility_violations;
  }
  verdict(violations == 0 && g_worst_cell_s < 120.0, "allocation_feasibility",
          "%zu runs  violations=%llu  slowest_cell=%.2fs", g_cells.size(),
          static_cast<unsigned long long>(violations), g_worst_cell_s);
}

void check_conservation() {
  double worst = 0.0;
  int bad_tuples = 0;
  for (const auto& [key, run] : g_cells) {
    (void)key;
    worst = std::max(worst, run.rep.max_conservation_residual_mb);
    if (!run.rep.tuple_conservation_ok) bad_tuples++;
  }
  verdict(worst <= 1e-9 && bad_tuples == 0, "conservation_suite",
          "%zu runs  max_byte_residual=%.2e MB  tuple_mismatches=%d",
          g_cells.size(), worst, bad_tuples);
}

// -------------------------------------------------------------------------
// 5-7. Directional comparisons on the single-rack bottleneck sweeps.

void check_throughput_trend() {
  bool ok = true;
  double worst = kInf;
  for (const char* name : {"tt_bottleneck", "ti_bottleneck"})
    for (double cap : {10.0, 15.0, 20.0}) {
      const double aa =
          cell(name, AllocatorChoice::app_aware, cap).apps[0].mean_throughput_tps;
      const double mm = cell(name, AllocatorChoice::maxmin_tcp, cap)
                            .apps[0]
                            .mean_throughput_tps;
      const double gain = aa / mm;
      worst = std::min(worst, gain);
      if (!(gain >= 1.10)) ok = false;
    }
  verdict(ok, "throughput_trend", "6 cells  min gain=%.3fx (need >=1.10x)",
          worst);
}

void check_latency_trend() {
  bool ok = true;
  double worst = 0.0;
  for (const char* name : {"tt_bottleneck", "ti_bottleneck"})
    for (double cap : {10.0, 15.0, 20.0}) {
      const double aa =
          cell(name, AllocatorChoice::app_aware, cap).apps[0].latency_mean_s;
      const double mm =
          cell(name, AllocatorChoice::maxmin_tcp, cap).apps[0].latency_mean_s;
      const double ratio = aa / mm;
      worst = std::max(worst, ratio);
      if (!(ratio <= 0.95)) ok = false;
    }
  verdict(ok, "latency_trend", "6 cells  max ratio=%.3fx (need <=0.95x)",
          worst);
}

void check_bottleneck_utilization() {
  bool ok = true;
  double worst_abs = 1.0, worst_rel = kInf;
  for (const char* name : {"tt_bottleneck", "ti_bottleneck"})
    for (double cap : {10.0, 15.0, 20.0}) {
      const MetricsReport& aa = cell(name, AllocatorChoice::app_aware, cap);
      const MetricsReport& mm = cell(name, AllocatorChoice::maxmin_tcp, cap);
      if (!aa.has_bottleneck_links || !mm.has_bottleneck_links) ok = false;
      worst_abs = std::min(worst_abs, aa.mean_bottleneck_utilization);
      const double rel =
          aa.mean_bottleneck_utilization / mm.mean_bottleneck_utilization;
      worst_rel = std::min(worst_rel, rel);
      if (!(aa.mean_bottleneck_utilization >= 0.95 && rel >= 0.97)) ok = false;
    }
  verdict(ok, "bottleneck_utilization",
          "6 cells  min util=%.3f (need >=0.95)  min vs baseline=%.3fx "
          "(need >=0.97x)",
          worst_abs, worst_rel);
}

// -------------------------------------------------------------------------
// 8. Multi-hop: throttled fabric stays feasible and keeps the advantage.

void check_multihop() {
  bool ok = true;
  double worst = kInf;
  uint64_t violations = 0;
  for (double cap : {10.0, 15.0, 20.0}) {
    const MetricsReport& aa =
        cell("ti_multihop", AllocatorChoice::app_aware, cap);
    const MetricsReport& mm =
        cell("ti_multihop", AllocatorChoice::maxmin_tcp, cap);
    violations += aa.feasibility_violations;
    const double gain =
        aa.apps[0].mean_throughput_tps / mm.apps[0].mean_throughput_tps;
    worst = std::min(worst, gain);
    if (!(gain >= 1.08)) ok = false;
  }
  verdict(ok && violations == 0, "multihop_scaling",
          "3 cells  min gain=%.3fx (need >=1.08x)  fabric_violations=%llu",
          worst, static_cast<unsigned long long>(violations));
}

// -------------------------------------------------------------------------
// 9. Application-level fairness on the shared uplink.

void check_app_fairness() {
  const MetricsReport& mm = cell("fair_5apps", AllocatorChoice::maxmin_tcp, 0.0);
  bool ok = mm.jain >= 0.78 && mm.jain <= 0.86;
  double worst_jain = 1.0;
  int worst_dry = 0;
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    const MetricsReport& fair =
        cell("fair_5apps@a" + std::to_string(alpha), AllocatorChoice::app_fair,
             0.0);
    worst_jain = std::min(worst_jain, fair.jain);
    if (!(fair.jain >= 0.95)) ok = false;
    for (const AppMetrics& app : fair.apps) {
      worst_dry = std::max(worst_dry, app.max_zero_run);
      if (app.max_zero_run > 3) ok = false;
    }
  }
  verdict(ok, "app_level_fairness",
          "baseline jain=%.3f (need 0.78..0.86)  scheduler min jain=%.3f "
          "(need >=0.95)  max dry run=%d epochs (need <=3)",
          mm.jain, worst_jain, worst_dry);
}

// -------------------------------------------------------------------------
// 10. Allocation decision stays cheap at desk scale.

void check_overhead() {
  // 16 uplinks, 16 downlinks, 8 fabric links; 100 flows with 2-4 hop routes
  Rng rng(909);
  std::vector<std::pair<LinkKind, double>> links;
  for (int i = 0; i < 16; i++) links.push_back({LinkKind::uplink, 2.5});
  for (int i = 0; i < 16; i++) links.push_back({LinkKind::downlink, 2.5});
  for (int i = 0; i < 8; i++)
    links.push_back({i % 2 ? LinkKind::core_to_rack : LinkKind::rack_to_core,
                     10.0});
  std::vector<std::vector<LinkId>> routes;
  for (int f = 0; f < 100; f++) {
    std::vector<LinkId> r;
    r.push_back(static_cast<LinkId>(rng.next_u64() % 16));
    if (rng.next_u64() & 1) {
      r.push_back(static_cast<LinkId>(32 + rng.next_u64() % 4 * 2));
      r.push_back(static_cast<LinkId>(33 + rng.next_u64() % 4 * 2));
    }
    r.push_back(static_cast<LinkId>(16 + rng.next_u64() % 16));
    routes.push_back(r);
  }
  Inst inst = make_inst(links, routes);

  const int rounds = 1000;
  std::vector<std::vector<FlowState>> telemetry(rounds);
  for (auto& states : telemetry) {
    states.resize(100);
    for (FlowState& s : states) {
      s.interval = 5.0;
      s.volume = 10.0 * rng.next_unit();
      s.L_s_end = 4.0 * rng.next_unit();
      s.L_s_start = 0.5 * s.L_s_end;
      s.L_r_end = 4.0 * rng.next_unit();
      s.L_r_start = 0.5 * s.L_r_end;
    }
  }

  double sink = 0.0;
  const double t0 = now_s();
  for (int round = 0; round < rounds; round++) {
    inst.states = telemetry[round];
    AllocationVector alloc = allocate_step(inst.inputs(), 5.0 * round);
    sink += alloc.rate[0];
  }
  const double mean_ms = (now_s() - t0) / rounds * 1e3;
  verdict(mean_ms < 10.0 && std::isfinite(sink), "allocator_overhead",
          "100 flows / 40 links  mean=%.3f ms over %d calls (need <10 ms)",
          mean_ms, rounds);
}

// -------------------------------------------------------------------------
// 11. Equal seeds reproduce every output byte.

std::map<std::string, std::string> slurp_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

void check_determinism() {
  const fs::path root = fs::temp_directory_path() / "streamsim_acceptance";
  fs::remove_all(root);
  bool ok = true;
  int files_compared = 0;
  for (const auto& [file, alloc] :
       std::vector<std::pair<const char*, AllocatorChoice>>{
           {"tt_bottleneck.json", AllocatorChoice::app_aware},
           {"fair_5apps.json", AllocatorChoice::app_fair}}) {
    Scenario sc = load_scenario(scenario_path(file));
    SimConfig cfg = sc.sim;
    cfg.allocator = alloc;
    const fs::path a = root / (sc.name + "_a"), b = root / (sc.name + "_b");
    run_simulation(make_setup(sc), cfg, a.string());
    run_simulation(make_setup(sc), cfg, b.string());
    auto fa = slurp_dir(a), fb = slurp_dir(b);
    if (fa.empty() || fa != fb) ok = false;
    files_compared += static_cast<int>(fa.size());
  }
  fs::remove_all(root);
  verdict(ok, "determinism", "2 scenarios rerun  %d files byte-identical",
          files_compared);
}

}  // namespace

int main() {
  std::printf("== streamsim acceptance ==\n");
  check_uplink_oracle();
  check_downlink_oracle();
  check_maxmin_baseline();
  run_scenario_matrix();
  check_feasibility();
  check_throughput_trend();
  check_latency_trend();
  check_bottleneck_utilization();
  check_multihop();
  check_app_fairness();
  check_overhead();
  check_determinism();
  check_conservation();
  std::printf("== %s (%d failure%s) ==\n",
              g_failures == 0 ? "ALL CHECKS PASSED" : "CHECKS FAILED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
