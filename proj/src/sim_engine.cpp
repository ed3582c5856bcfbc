#include "streamsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "streamsim/workload.hpp"

namespace streamsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeEps = 1e-9;
constexpr double kByteEps = 1e-9;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// What a tuple stands for in metric terms: the source tuples it was derived
// from. Reference inputs of a latest-join are deliberately not folded in, so
// a flood of side-channel tuples cannot inflate throughput or dilute latency.
struct Lineage {
  uint64_t count = 0;
  double sum_emit = 0.0;
  double min_emit = 0.0;
  double max_emit = 0.0;
};

void fold(Lineage& a, const Lineage& b) {
  if (b.count == 0) return;
  if (a.count == 0) {
    a = b;
    return;
  }
  a.count += b.count;
  a.sum_emit += b.sum_emit;
  a.min_emit = std::min(a.min_emit, b.min_emit);
  a.max_emit = std::max(a.max_emit, b.max_emit);
}

struct Tuple {
  double size = 0.0;  // MB
  double emit = 0.0;
  int key = 0;
  Lineage subj;
  uint64_t ledger = 0;  // source tuples absorbed, for exact conservation
};

struct SendEntry {
  Tuple t;
  double remaining = 0.0;  // MB still to cross
};

struct RecvEntry {
  Tuple t;
  double arrival = 0.0;
};

struct FlowRt {
  std::deque<SendEntry> send;
  std::deque<RecvEntry> recv;
  double rate = 0.0;       // MB/s granted this epoch (external flows)
  double serial_lb = 0.0;  // s/MB store-and-forward floor over the route
  double last_arrival = 0.0;
};

struct InstanceRt {
  int app = -1;
  InstanceId local_id = -1;
  int replica = 0;
  const OperatorSpec* op = nullptr;
  std::vector<FlowId> in_main;  // every inbound flow; drivers for latest
  std::vector<FlowId> in_ref;   // latest-join reference flows
  std::vector<int> out_edges;   // dag edge indices
  std::vector<std::vector<FlowId>> out_flow;  // per edge: dst replica -> flow
  std::vector<int> shuffle_cur;
  double next_free = 0.0;  // service cursor
  // windowed aggregation
  double window_next = 0.0;
  double win_bytes = 0.0;
  Lineage win_subj;
  uint64_t win_ledger = 0;
  bool windowed = false;
  // latest-join sticky reference: once one reference tuple has been folded,
  // later drivers can always proceed against the retained value
  bool has_ref = false;
  int emitter = -1;
};

double weighted_percentile(std::vector<std::pair<double, double>>& samples,
                           double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  double total = 0.0;
  for (const auto& s : samples) total += s.second;
  const double need = q * total;
  double cum = 0.0;
  for (const auto& s : samples) {
    cum += s.second;
    if (cum + 1e-12 >= need) return s.first;
  }
  return samples.back().first;
}

struct AppRt {
  const AppDag* dag = nullptr;
  InstanceGraph g;
  Placement pl;
  int first_inst = 0;
  FlowId first_flow = 0;
};

class Engine {
 public:
  Engine(const SimSetup& setup, const SimConfig& cfg, std::string out)
      : setup_(setup), cfg_(cfg), out_(std::move(out)), topo_(setup.topo) {}

  MetricsReport run() {
    check_config();
    build();
    open_traces();
    IntervalClock clock{cfg_.sample_period_s, cfg_.alloc_period_s};
    const double dt = cfg_.sample_period_s;
    const int64_t steps = std::llround(cfg_.duration_s / dt);
    for (int64_t s = 0; s < steps; ++s) {
      const double t0 = static_cast<double>(s) * dt;
      const double t1 = t0 + dt;
      if (clock.is_alloc_boundary(s)) epoch_boundary(t0, s == 0);
      window_emissions(t0);
      emit_sources(t0, t1);
      transfer(t0, t1);
      process(t0, t1);
      sample(t0);
    }
    close_interval(static_cast<double>(steps) * dt);
    MetricsReport r = finalize();
    write_summary(r);
    return r;
  }

 private:
  void check_config() {
    if (cfg_.duration_s <= 0.0)
      throw std::invalid_argument("duration must be positive");
    IntervalClock clock{cfg_.sample_period_s, cfg_.alloc_period_s};
    clock.validate();
    const double epochs = cfg_.duration_s / cfg_.alloc_period_s;
    if (std::abs(epochs - std::llround(epochs)) > 1e-6)
      throw std::invalid_argument(
          "duration must cover a whole number of allocation periods");
    if (cfg_.warmup_epochs < 0)
      throw std::invalid_argument("warmup_epochs must be >= 0");
    warmup_end_ = cfg_.warmup_epochs * cfg_.alloc_period_s;
    if (warmup_end_ >= cfg_.duration_s)
      throw std::invalid_argument("warm-up covers the whole run");
    if (cfg_.fairness.alpha < 0.0 || cfg_.fairness.alpha > 1.0)
      throw std::invalid_argument("fairness alpha must lie in [0, 1]");
    if (cfg_.fairness.levels < 1)
      throw std::invalid_argument("fairness levels must be >= 1");
    if (cfg_.fairness.starvation_epochs < 1)
      throw std::invalid_argument("starvation_epochs must be >= 1");
    if (setup_.apps.empty())
      throw std::invalid_argument("no applications configured");
  }

  void build() {
    const int nl = static_cast<int>(topo_.links().size());
    cap_.resize(nl);
    kinds_.resize(nl);
    for (const Link& l : topo_.links()) {
      cap_[l.id] = allocatable_capacity(l, 0.0);
      kinds_[l.id] = l.kind;
    }
    sets_.members.assign(nl, {});

    std::vector<MachineId> all_machines(topo_.machine_count());
    std::iota(all_machines.begin(), all_machines.end(), 0);

    int inst_base = 0;
    for (size_t a = 0; a < setup_.apps.size(); ++a) {
      const AppSetup& as = setup_.apps[a];
      validate(as.dag);
      AppRt ar;
      ar.dag = &as.dag;
      ar.g = expand(as.dag);
      ar.first_inst = inst_base;
      ar.first_flow = static_cast<FlowId>(flows_.size());
      bool any_pin = false;
      for (const auto& lst : as.placement)
        if (!lst.empty()) any_pin = true;
      if (!any_pin) {
        ar.pl = place_round_robin(ar.g, all_machines);
      } else {
        if (as.placement.size() != as.dag.operators.size())
          throw std::invalid_argument(
              "placement must list every operator of app " + as.dag.name);
        ar.pl.machine_of.resize(ar.g.instances.size());
        for (const Instance& ins : ar.g.instances) {
          const auto& lst = as.placement[ins.op];
          if (static_cast<int>(lst.size()) !=
              as.dag.operators[ins.op].parallelism)
            throw std::invalid_argument(
                "placement size differs from parallelism for operator " +
                as.dag.operators[ins.op].name);
          ar.pl.machine_of[ins.id] = lst[ins.replica];
        }
      }
      FlowMap fm =
          flow_map(ar.g, ar.pl, topo_, static_cast<AppId>(a), ar.first_flow);
      for (const Flow& fl : fm.flows) flows_.push_back(fl);
      for (int l = 0; l < nl; ++l)
        for (FlowId f : fm.sets.members[l]) sets_.members[l].push_back(f);
      inst_base += static_cast<int>(ar.g.instances.size());
      apps_.push_back(std::move(ar));
    }

    const size_t nf = flows_.size();
    frt_.resize(nf);
    for (const Flow& fl : flows_) {
      if (fl.is_internal) continue;
      double lb = 0.0;
      for (LinkId l : fl.route.link_ids) lb += 1.0 / topo_.link(l).capacity;
      frt_[fl.id].serial_lb = lb;
    }
    prof_.reset(static_cast<int>(nf));

    irt_.resize(inst_base);
    app_external_.assign(apps_.size(), {});
    for (size_t a = 0; a < apps_.size(); ++a) {
      AppRt& ar = apps_[a];
      const AppDag& dag = *ar.dag;
      for (const Instance& ins : ar.g.instances) {
        InstanceRt& inst = irt_[ar.first_inst + ins.id];
        inst.app = static_cast<int>(a);
        inst.local_id = ins.id;
        inst.replica = ins.replica;
        inst.op = &dag.operators[ins.op];
        inst.windowed = inst.op->window_s > 0.0;
        inst.window_next = inst.op->window_s;
        if (inst.op->kind == OperatorKind::source) {
          const uint64_t s =
              cfg_.seed * 0x9E3779B97F4A7C15ull +
              static_cast<uint64_t>(ar.first_inst + ins.id + 1) *
                  0xBF58476D1CE4E5B9ull;
          emitters_.emplace_back(s, inst.op->source_rate, inst.op->key_count,
                                 inst.op->key_skew, inst.op->poisson);
          inst.emitter = static_cast<int>(emitters_.size()) - 1;
        }
        for (size_t e = 0; e < dag.edges.size(); ++e) {
          if (dag.edges[e].upstream != ins.op) continue;
          inst.out_edges.push_back(static_cast<int>(e));
          const int dpar =
              dag.operators[dag.edges[e].downstream].parallelism;
          inst.out_flow.emplace_back(dpar, -1);
          inst.shuffle_cur.push_back(0);
        }
      }
      for (FlowId f = ar.first_flow; f < static_cast<FlowId>(flows_.size()) &&
                                     flows_[f].app_id == static_cast<AppId>(a);
           ++f) {
        const Flow& fl = flows_[f];
        const InstanceEdge& ie = ar.g.edges[fl.instance_edge];
        const DagEdge& de = dag.edges[ie.dag_edge];
        InstanceRt& dst = irt_[ar.first_inst + fl.dst_instance];
        const bool is_ref =
            dst.op->join == JoinKind::latest &&
            dag.operators[de.upstream].name != dst.op->join_driver;
        (is_ref ? dst.in_ref : dst.in_main).push_back(f);
        InstanceRt& src = irt_[ar.first_inst + fl.src_instance];
        for (size_t ei = 0; ei < src.out_edges.size(); ++ei) {
          if (src.out_edges[ei] == ie.dag_edge) {
            src.out_flow[ei][ar.g.instances[fl.dst_instance].replica] = f;
            break;
          }
        }
        if (!fl.is_internal) app_external_[a].push_back(f);
      }
      const auto topo_ops = topological_order(dag);
      for (int op : topo_ops)
        for (const Instance& ins : ar.g.instances)
          if (ins.op == op) order_.push_back(ar.first_inst + ins.id);
    }

    for (const InstanceRt& inst : irt_) {
      if (inst.windowed && (inst.op->join != JoinKind::none ||
                            inst.op->kind != OperatorKind::transform))
        throw std::invalid_argument(
            "windowed operators must be transforms consuming in arrival order");
      if (inst.op->kind != OperatorKind::source &&
          inst.op->join == JoinKind::latest &&
          (inst.in_main.empty() || inst.in_ref.empty()))
        throw std::invalid_argument(
            "latest join needs both driver and reference inputs");
    }

    const size_t na = apps_.size();
    app_emitted_.assign(na, 0);
    app_completed_.assign(na, 0);
    epoch_delivered_.assign(na, 0.0);
    epoch_series_.assign(na, {});
    step_subj_.assign(na, 0.0);
    post_subj_.assign(na, 0.0);
    post_bytes_.assign(na, 0.0);
    lat_sum_.assign(na, 0.0);
    lat_n_.assign(na, 0.0);
    lat_samples_.assign(na, {});
    recs_.resize(na);
    for (size_t a = 0; a < na; ++a) recs_[a].app_id = static_cast<AppId>(a);
    starved_.assign(na, 0);
    app_ids_.resize(na);
    std::iota(app_ids_.begin(), app_ids_.end(), 0);
    qsend_.assign(nf, {});
    qrecv_.assign(nf, {});
    prior_.assign(nf, 0.0);
    states_.assign(nf, FlowState{});
    carried_.assign(nl, 0.0);
    util_sum_.assign(nl, 0.0);
    util_n_.assign(nl, 0);
    ever_flagged_.assign(nl, 0);
  }

  void open_traces() {
    if (out_.empty()) return;
    std::filesystem::create_directories(out_);
    f_state_.open(out_ + "/flow_state.csv");
    f_state_ << "t,flow_id,L_s_start,L_r_start,volume,L_s_end,L_r_end\n";
    f_alloc_.open(out_ + "/allocation.csv");
    f_alloc_ << "t,flow_id,rate_mbps\n";
    f_metrics_.open(out_ + "/metrics.csv");
    f_metrics_ << "t,app_id,throughput_tps,link_id,utilization\n";
    if (cfg_.allocator == AllocatorChoice::app_fair) {
      f_groups_.open(out_ + "/fair_groups.csv");
      f_groups_ << "t,app_id,group,mu_recent_mb_s,mu_ewma_mb_s,granted_mb_s\n";
    }
  }

  AllocInputs alloc_inputs() {
    AllocInputs in;
    in.flows = &flows_;
    in.sets = &sets_;
    in.kinds = &kinds_;
    in.capacity = &cap_;
    in.states = &states_;
    in.prior_rates = &prior_;
    in.delta_t = cfg_.alloc_period_s;
    return in;
  }

  // Snapshot per-flow interval states, audit the double-entry byte books,
  // roll the per-epoch delivery series, and record which links look
  // bottlenecked (for reporting under every allocator).
  void close_interval(double t) {
    for (FlowId f = 0; f < static_cast<FlowId>(flows_.size()); ++f) {
      states_[f] = prof_.end_interval(f, t);
      const double rs = std::abs(prof_.send_backlog(f) - qsend_[f].value());
      const double rr = std::abs(prof_.recv_backlog(f) - qrecv_[f].value());
      max_resid_ = std::max({max_resid_, rs, rr});
      if (f_state_.is_open()) {
        f_state_ << fmt(t) << ',' << f << ',' << fmt(states_[f].L_s_start)
                 << ',' << fmt(states_[f].L_r_start) << ','
                 << fmt(states_[f].volume) << ',' << fmt(states_[f].L_s_end)
                 << ',' << fmt(states_[f].L_r_end) << '\n';
      }
    }
    for (size_t a = 0; a < apps_.size(); ++a) {
      epoch_series_[a].push_back(epoch_delivered_[a]);
      epoch_delivered_[a] = 0.0;
    }
    AllocInputs in = alloc_inputs();
    const BottleneckSets bs = detect_bottlenecks(in);
    for (size_t l = 0; l < ever_flagged_.size(); ++l)
      if (bs.link_flagged[l]) ever_flagged_[l] = 1;
  }

  void epoch_boundary(double t, bool first) {
    if (first) {
      // Nothing measured yet: start from max-min over fully backlogged
      // demands until the first interval closes.
      std::vector<double> demand(flows_.size(), 0.0);
      for (size_t f = 0; f < flows_.size(); ++f)
        if (!flows_[f].is_internal) demand[f] = kInf;
      apply_rates(maxmin_baseline(flows_, sets_, cap_, demand), t);
    } else {
      close_interval(t);
      std::vector<double> x;
      switch (cfg_.allocator) {
        case AllocatorChoice::app_aware:
          x = allocate_step(alloc_inputs(), t).rate;
          break;
        case AllocatorChoice::maxmin_tcp: {
          std::vector<double> demand(flows_.size(), 0.0);
          for (size_t f = 0; f < flows_.size(); ++f)
            if (!flows_[f].is_internal)
              demand[f] = (states_[f].volume + states_[f].L_s_end) /
                          cfg_.alloc_period_s;
          x = maxmin_baseline(flows_, sets_, cap_, demand);
          break;
        }
        case AllocatorChoice::app_fair:
          x = fair_allocate(t);
          break;
      }
      apply_rates(x, t);
      ++epoch_idx_;
    }
    prof_.begin_interval(t);
  }

  void apply_rates(const std::vector<double>& x, double t) {
    for (size_t f = 0; f < flows_.size(); ++f) {
      if (flows_[f].is_internal) continue;
      if (!std::isfinite(x[f]) || x[f] < -AllocTuning::slack)
        throw std::runtime_error("allocator produced an invalid rate");
      frt_[f].rate = std::max(0.0, x[f]);
      prior_[f] = frt_[f].rate;
      if (f_alloc_.is_open())
        f_alloc_ << fmt(t) << ',' << f << ','
                 << fmt(mb_to_mbps(frt_[f].rate)) << '\n';
    }
    if (max_link_overshoot(prior_, sets_, cap_) > AllocTuning::slack)
      ++violations_;
  }

  std::vector<double> fair_allocate(double t) {
    const double dt = cfg_.alloc_period_s;
    for (size_t a = 0; a < apps_.size(); ++a) {
      double mu = 0.0;
      for (FlowId f : app_external_[a]) mu += states_[f].volume;
      ewma_update(recs_[a], mu / dt, cfg_.fairness.alpha);
    }
    groups_ = group_apps(recs_, cfg_.fairness.levels);
    rotate_for_starvation(groups_, starved_, app_ids_,
                          cfg_.fairness.starvation_epochs);
    std::vector<double> best(flows_.size(), kInf);
    for (LinkId l = 0; l < static_cast<LinkId>(cap_.size()); ++l) {
      const auto& mem = sets_.members[l];
      if (mem.empty()) continue;
      std::vector<ScheduledFlow> sf;
      sf.reserve(mem.size());
      for (FlowId f : mem)
        sf.push_back({f, flows_[f].app_id,
                      (states_[f].volume + states_[f].L_s_end) / dt});
      const std::vector<double> grant = schedule_link(cap_[l], sf, groups_);
      for (size_t i = 0; i < sf.size(); ++i)
        best[sf[i].flow] = std::min(best[sf[i].flow], grant[i]);
    }
    std::vector<double> x(flows_.size(), 0.0);
    for (size_t f = 0; f < flows_.size(); ++f)
      if (!flows_[f].is_internal && best[f] < kInf) x[f] = best[f];
    backfill(x, flows_, sets_, cap_);
    for (size_t a = 0; a < apps_.size(); ++a) {
      double tot = 0.0;
      for (FlowId f : app_external_[a]) tot += x[f];
      if (!app_external_[a].empty()) {
        if (tot <= AllocTuning::slack)
          ++starved_[a];
        else
          starved_[a] = 0;
      }
      if (f_groups_.is_open())
        f_groups_ << fmt(t) << ',' << a << ','
                  << groups_.group_of(static_cast<AppId>(a)) << ','
                  << fmt(recs_[a].mu_recent) << ',' << fmt(recs_[a].mu_ewma)
                  << ',' << fmt(tot) << '\n';
    }
    return x;
  }

  void window_emissions(double t) {
    for (int gid : order_) {
      InstanceRt& inst = irt_[gid];
      if (!inst.windowed) continue;
      while (inst.window_next <= t + kTimeEps) {
        if (inst.win_ledger > 0 || inst.win_subj.count > 0) {
          Tuple d;
          d.size = inst.op->out_tuple_size +
                   inst.op->selectivity * inst.win_bytes;
          d.key = inst.replica;
          d.subj = inst.win_subj;
          d.ledger = inst.win_ledger;
          emit_from(inst, d, inst.window_next);
          inst.win_bytes = 0.0;
          inst.win_subj = Lineage{};
          inst.win_ledger = 0;
        }
        inst.window_next += inst.op->window_s;
      }
    }
  }

  void emit_sources(double t0, double t1) {
    for (int gid : order_) {
      InstanceRt& inst = irt_[gid];
      if (inst.emitter < 0) continue;
      scratch_.clear();
      emitters_[inst.emitter].generate(t0, t1, scratch_);
      for (const Emission& e : scratch_) {
        Tuple t;
        t.size = inst.op->source_tuple_size;
        t.key = e.key;
        t.subj = Lineage{1, e.time, e.time, e.time};
        t.ledger = 1;
        app_emitted_[inst.app] += 1;
        emit_from(inst, t, e.time);
      }
    }
  }

  void emit_from(InstanceRt& inst, const Tuple& t, double when) {
    const uint64_t units = t.ledger;
    int copies = 0;
    const AppDag& dag = *apps_[inst.app].dag;
    for (size_t ei = 0; ei < inst.out_edges.size(); ++ei) {
      const DagEdge& e = dag.edges[inst.out_edges[ei]];
      const auto& targets = inst.out_flow[ei];
      const int n = static_cast<int>(targets.size());
      auto send_to = [&](int replica) {
        const FlowId f = targets[replica];
        if (f < 0)
          throw std::logic_error("tuple routed to a replica with no flow");
        enqueue(f, t, when);
        ++copies;
      };
      switch (e.grouping.kind) {
        case GroupingKind::shuffle:
          send_to(inst.shuffle_cur[ei]++ % n);
          break;
        case GroupingKind::key_based:
          send_to(((t.key % n) + n) % n);
          break;
        case GroupingKind::global:
          send_to(e.grouping.target_index);
          break;
        case GroupingKind::all:
          for (int rpl = 0; rpl < n; ++rpl) send_to(rpl);
          break;
      }
    }
    // duplication (several out-edges, or an `all` grouping) mints new ledger
    // units so emitted == completed + resident stays an exact identity
    if (copies > 1)
      app_emitted_[inst.app] += static_cast<uint64_t>(copies - 1) * units;
  }

  void enqueue(FlowId f, Tuple t, double when) {
    t.emit = when;
    prof_.on_generated(f, t.size);
    qsend_[f].add(t.size);
    if (flows_[f].is_internal) {
      deliver(f, t, when);  // co-located instances hand over instantly
    } else {
      frt_[f].send.push_back({t, t.size});
    }
  }

  void deliver(FlowId f, const Tuple& t, double arrival) {
    FlowRt& fr = frt_[f];
    qsend_[f].add(-t.size);
    qrecv_[f].add(t.size);
    prof_.on_transferred(f, t.size);
    const Flow& fl = flows_[f];
    if (!fl.is_internal)
      for (LinkId l : fl.route.link_ids) carried_[l] += t.size;
    const double a = std::max(arrival, fr.last_arrival);
    fr.last_arrival = a;
    fr.recv.push_back({t, a});
  }

  // Fluid FIFO service of one flow over [t0, t1): the queue drains at the
  // granted rate; bytes are credited when a tuple finishes so backlogs match
  // the tuple queues exactly. Arrivals never beat the per-hop serialization
  // floor.
  void transfer_flow(FlowId f, double t0, double t1) {
    FlowRt& fr = frt_[f];
    const double r = fr.rate;
    if (!(r > 0.0)) return;
    double now = t0;
    while (!fr.send.empty()) {
      SendEntry& e = fr.send.front();
      const double begin = std::max(now, e.t.emit);
      if (begin >= t1 - kTimeEps) break;
      const double budget = (t1 - begin) * r;
      if (budget + kByteEps < e.remaining) {
        e.remaining -= budget;
        break;
      }
      const double done = begin + e.remaining / r;
      const double arrival =
          std::max(done, e.t.emit + e.t.size * fr.serial_lb);
      const Tuple moved = e.t;
      fr.send.pop_front();
      deliver(f, moved, arrival);
      now = done;
    }
  }

  void transfer(double t0, double t1) {
    for (FlowId f = 0; f < static_cast<FlowId>(flows_.size()); ++f)
      if (!flows_[f].is_internal) transfer_flow(f, t0, t1);
  }

  Tuple consume(FlowId f) {
    FlowRt& fr = frt_[f];
    Tuple t = fr.recv.front().t;
    fr.recv.pop_front();
    qrecv_[f].add(-t.size);
    prof_.on_processed(f, t.size);
    return t;
  }

  void record_completion(int app, const Lineage& subj, uint64_t ledger,
                         double bytes, double done) {
    app_completed_[app] += ledger;
    epoch_delivered_[app] += bytes;
    step_subj_[app] += static_cast<double>(subj.count);
    if (done <= warmup_end_ + kTimeEps) return;
    post_subj_[app] += static_cast<double>(subj.count);
    post_bytes_[app] += bytes;
    if (subj.count == 0) return;
    lat_sum_[app] += static_cast<double>(subj.count) * done - subj.sum_emit;
    lat_n_[app] += static_cast<double>(subj.count);
    // spread the digest's latency mass over its emit span for percentiles
    const int k = static_cast<int>(std::min<uint64_t>(subj.count, 8));
    const double span = subj.max_emit - subj.min_emit;
    for (int i = 0; i < k; ++i) {
      const double e = subj.min_emit + (i + 0.5) * span / k;
      lat_samples_[app].push_back(
          {done - e, static_cast<double>(subj.count) / k});
    }
  }

  void finish_output(InstanceRt& inst, const Lineage& subj, uint64_t ledger,
                     double in_bytes, int key, double done) {
    if (inst.op->kind == OperatorKind::sink) {
      record_completion(inst.app, subj, ledger, in_bytes, done);
      return;
    }
    Tuple o;
    o.size = inst.op->out_tuple_size + inst.op->selectivity * in_bytes;
    o.key = key;
    o.subj = subj;
    o.ledger = ledger;
    emit_from(inst, o, done);
  }

  void process_instance(InstanceRt& inst, double t0, double t1) {
    if (inst.op->kind == OperatorKind::source) return;
    const double svc = 1.0 / inst.op->service_rate;
    switch (inst.op->join) {
      case JoinKind::none: {
        for (;;) {
          FlowId best = -1;
          double ba = kInf;
          for (FlowId f : inst.in_main) {
            const auto& q = frt_[f].recv;
            if (!q.empty() && q.front().arrival < ba) {
              ba = q.front().arrival;
              best = f;
            }
          }
          if (best < 0) break;
          const double start = std::max({ba, inst.next_free, t0});
          const double done = start + svc;
          if (done > t1 + kTimeEps) break;
          const Tuple tp = consume(best);
          inst.next_free = done;
          if (inst.windowed) {
            inst.win_bytes += tp.size;
            fold(inst.win_subj, tp.subj);
            inst.win_ledger += tp.ledger;
          } else {
            finish_output(inst, tp.subj, tp.ledger, tp.size, tp.key, done);
          }
        }
        break;
      }
      case JoinKind::zip: {
        for (;;) {
          double arr = 0.0;
          bool ready = true;
          for (FlowId f : inst.in_main) {
            const auto& q = frt_[f].recv;
            if (q.empty()) {
              ready = false;
              break;
            }
            arr = std::max(arr, q.front().arrival);
          }
          if (!ready) break;
          const double start = std::max({arr, inst.next_free, t0});
          const double done = start + svc;
          if (done > t1 + kTimeEps) break;
          Lineage subj;
          uint64_t ledger = 0;
          double bytes = 0.0;
          int key = 0;
          bool first = true;
          for (FlowId f : inst.in_main) {
            const Tuple tp = consume(f);
            if (first) {
              key = tp.key;
              first = false;
            }
            fold(subj, tp.subj);
            ledger += tp.ledger;
            bytes += tp.size;
          }
          inst.next_free = done;
          finish_output(inst, subj, ledger, bytes, key, done);
        }
        break;
      }
      case JoinKind::latest: {
        for (;;) {
          FlowId best = -1;
          double ba = kInf;
          for (FlowId f : inst.in_main) {
            const auto& q = frt_[f].recv;
            if (!q.empty() && q.front().arrival < ba) {
              ba = q.front().arrival;
              best = f;
            }
          }
          if (best < 0) break;
          const double d_emit = frt_[best].recv.front().t.emit;
          double start = std::max({ba, inst.next_free, t0});
          if (!inst.has_ref) {
            double ra = kInf;
            for (FlowId f : inst.in_ref) {
              const auto& q = frt_[f].recv;
              if (!q.empty() && q.front().t.emit <= d_emit + kTimeEps)
                ra = std::min(ra, q.front().arrival);
            }
            if (ra == kInf) break;  // no usable reference yet: stall
            start = std::max(start, ra);
          }
          const double done = start + svc;
          if (done > t1 + kTimeEps) break;
          const Tuple dt = consume(best);
          Lineage subj = dt.subj;
          uint64_t ledger = dt.ledger;
          double bytes = dt.size;
          for (FlowId f : inst.in_ref) {
            auto& q = frt_[f].recv;
            while (!q.empty() && q.front().t.emit <= dt.emit + kTimeEps &&
                   q.front().arrival <= start + kTimeEps) {
              const Tuple rt = consume(f);
              ledger += rt.ledger;  // reference lineage stays out of subj
              bytes += rt.size;
              inst.has_ref = true;
            }
          }
          inst.next_free = done;
          finish_output(inst, subj, ledger, bytes, dt.key, done);
        }
        break;
      }
    }
  }

  void process(double t0, double t1) {
    for (int gid : order_) process_instance(irt_[gid], t0, t1);
  }

  void sample(double t0) {
    const bool post = t0 >= warmup_end_ - kTimeEps;
    const double dt = cfg_.sample_period_s;
    for (size_t a = 0; a < apps_.size(); ++a) {
      if (f_metrics_.is_open())
        f_metrics_ << fmt(t0) << ',' << a << ',' << fmt(step_subj_[a] / dt)
                   << ",,\n";
      step_subj_[a] = 0.0;
    }
    for (LinkId l = 0; l < static_cast<LinkId>(cap_.size()); ++l) {
      const double u = carried_[l] / (cap_[l] * dt);
      if (post) {
        util_sum_[l] += u;
        ++util_n_[l];
      }
      if (f_metrics_.is_open())
        f_metrics_ << fmt(t0) << ",,," << l << ',' << fmt(u) << '\n';
      carried_[l] = 0.0;
    }
  }

  MetricsReport finalize() {
    MetricsReport r;
    const double post_span = cfg_.duration_s - warmup_end_;
    const size_t na = apps_.size();
    std::vector<uint64_t> resident(na, 0);
    for (const Flow& fl : flows_) {
      const FlowRt& fr = frt_[fl.id];
      for (const SendEntry& e : fr.send) resident[fl.app_id] += e.t.ledger;
      for (const RecvEntry& e : fr.recv) resident[fl.app_id] += e.t.ledger;
    }
    for (const InstanceRt& inst : irt_)
      if (inst.windowed) resident[inst.app] += inst.win_ledger;
    r.tuple_conservation_ok = true;
    std::vector<double> delivered(na, 0.0);
    for (size_t a = 0; a < na; ++a) {
      AppMetrics m;
      m.app_id = static_cast<AppId>(a);
      m.name = apps_[a].dag->name;
      m.mean_throughput_tps = post_subj_[a] / post_span;
      m.mean_delivered_mb_s = post_bytes_[a] / post_span;
      delivered[a] = m.mean_delivered_mb_s;
      m.latency_mean_s = lat_n_[a] > 0.0 ? lat_sum_[a] / lat_n_[a] : 0.0;
      m.latency_p50_s = weighted_percentile(lat_samples_[a], 0.50);
      m.latency_p99_s = weighted_percentile(lat_samples_[a], 0.99);
      m.emitted = app_emitted_[a];
      m.completed = app_completed_[a];
      m.resident = resident[a];
      if (m.emitted != m.completed + m.resident)
        r.tuple_conservation_ok = false;
      int run = 0, worst = 0;
      const auto& series = epoch_series_[a];
      for (size_t e = static_cast<size_t>(cfg_.warmup_epochs);
           e < series.size(); ++e) {
        if (series[e] <= kByteEps)
          worst = std::max(worst, ++run);
        else
          run = 0;
      }
      m.max_zero_run = worst;
      r.apps.push_back(std::move(m));
    }
    double util_acc = 0.0;
    int nb = 0;
    for (LinkId l = 0; l < static_cast<LinkId>(cap_.size()); ++l) {
      LinkMetrics lm;
      lm.id = l;
      lm.kind = kinds_[l];
      lm.bottlenecked = ever_flagged_[l] != 0;
      lm.mean_utilization = util_n_[l] > 0 ? util_sum_[l] / util_n_[l] : 0.0;
      if (lm.bottlenecked) {
        util_acc += lm.mean_utilization;
        ++nb;
      }
      r.links.push_back(lm);
    }
    r.has_bottleneck_links = nb > 0;
    r.mean_bottleneck_utilization = nb > 0 ? util_acc / nb : 0.0;
    double sum = 0.0;
    for (double v : delivered) sum += v;
    r.jain = (na > 1 && sum > 0.0) ? jain_index(delivered) : 1.0;
    r.feasibility_violations = violations_;
    r.max_conservation_residual_mb = max_resid_;
    r.epochs =
        epoch_series_.empty() ? 0 : static_cast<int>(epoch_series_[0].size());
    r.app_epoch_delivered_mb = epoch_series_;
    return r;
  }

  void write_summary(const MetricsReport& r) {
    if (out_.empty()) return;
    nlohmann::ordered_json j;
    j["config"] = {
        {"allocator", allocator_name(cfg_.allocator)},
        {"duration_s", cfg_.duration_s},
        {"sample_period_s", cfg_.sample_period_s},
        {"alloc_period_s", cfg_.alloc_period_s},
        {"seed", cfg_.seed},
        {"warmup_epochs", cfg_.warmup_epochs},
        {"fairness",
         {{"alpha", cfg_.fairness.alpha},
          {"levels", cfg_.fairness.levels},
          {"starvation_epochs", cfg_.fairness.starvation_epochs}}},
    };
    nlohmann::ordered_json apps = nlohmann::ordered_json::array();
    for (const AppMetrics& m : r.apps) {
      apps.push_back({{"app_id", m.app_id},
                      {"name", m.name},
                      {"throughput_tps", m.mean_throughput_tps},
                      {"delivered_mb_s", m.mean_delivered_mb_s},
                      {"latency_mean_s", m.latency_mean_s},
                      {"latency_p50_s", m.latency_p50_s},
                      {"latency_p99_s", m.latency_p99_s},
                      {"emitted", m.emitted},
                      {"completed", m.completed},
                      {"resident", m.resident},
                      {"max_zero_run", m.max_zero_run}});
    }
    j["apps"] = std::move(apps);
    nlohmann::ordered_json links = nlohmann::ordered_json::array();
    for (const LinkMetrics& lm : r.links) {
      links.push_back({{"link_id", lm.id},
                       {"kind", link_kind_name(lm.kind)},
                       {"bottlenecked", lm.bottlenecked},
                       {"mean_utilization", lm.mean_utilization}});
    }
    j["links"] = std::move(links);
    j["totals"] = {
        {"jain", r.jain},
        {"mean_bottleneck_utilization", r.mean_bottleneck_utilization},
        {"feasibility_violations", r.feasibility_violations},
        {"max_conservation_residual_mb", r.max_conservation_residual_mb},
        {"tuple_conservation_ok", r.tuple_conservation_ok},
        {"epochs", r.epochs},
    };
    std::ofstream out(out_ + "/summary.json");
    out << j.dump(2) << '\n';
  }

  const SimSetup& setup_;
  SimConfig cfg_;
  std::string out_;
  const Topology& topo_;

  std::vector<double> cap_;
  std::vector<LinkKind> kinds_;
  LinkFlowSets sets_;
  std::vector<Flow> flows_;
  std::vector<AppRt> apps_;
  std::vector<std::vector<FlowId>> app_external_;
  FlowProfiler prof_;
  std::vector<FlowRt> frt_;
  std::vector<InstanceRt> irt_;
  std::vector<int> order_;
  std::vector<SourceEmitter> emitters_;
  std::vector<Emission> scratch_;

  std::vector<AppThroughputRecord> recs_;
  PriorityGroups groups_;
  std::vector<int> starved_;
  std::vector<AppId> app_ids_;

  std::vector<FlowState> states_;
  std::vector<double> prior_;
  std::vector<CompensatedSum> qsend_, qrecv_;
  std::vector<double> carried_, util_sum_;
  std::vector<int64_t> util_n_;
  std::vector<char> ever_flagged_;
  std::vector<uint64_t> app_emitted_, app_completed_;
  std::vector<double> epoch_delivered_;
  std::vector<std::vector<double>> epoch_series_;
  std::vector<double> step_subj_, post_subj_, post_bytes_;
  std::vector<double> lat_sum_, lat_n_;
  std::vector<std::vector<std::pair<double, double>>> lat_samples_;
  uint64_t violations_ = 0;
  double max_resid_ = 0.0;
  double warmup_end_ = 0.0;
  int epoch_idx_ = 0;

  std::ofstream f_state_, f_alloc_, f_metrics_, f_groups_;
};

}  // namespace

const char* allocator_name(AllocatorChoice c) {
  switch (c) {
    case AllocatorChoice::app_aware:
      return "app_aware";
    case AllocatorChoice::maxmin_tcp:
      return "maxmin_tcp";
    case AllocatorChoice::app_fair:
      return "app_fair";
  }
  return "unknown";
}

MetricsReport run_simulation(const SimSetup& setup, const SimConfig& cfg,
                             const std::string& out_dir) {
  Engine e(setup, cfg, out_dir);
  return e.run();
}

}  // namespace streamsim
