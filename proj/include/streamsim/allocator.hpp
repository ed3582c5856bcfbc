#pragma once

#include <vector>

#include "streamsim/app_graph.hpp"
#include "streamsim/flow_profiler.hpp"

namespace streamsim {

// Shared tunables. The demand factor flags a link as contended when measured
// carry approaches capacity; slack is the arithmetic tolerance for equality
// and feasibility checks.
struct AllocTuning {
  static constexpr double demand_factor = 0.95;
  static constexpr double slack = 1e-9;
  static constexpr int backfill_passes = 3;
};

struct AllocationVector {
  double epoch_time = 0.0;
  std::vector<double> rate;  // MB/s per FlowId; internal flows stay 0 (unmanaged)
};

struct BottleneckSets {
  std::vector<char> link_flagged;  // per LinkId
  std::vector<LinkId> uplinks, downlinks, internal;
  std::vector<char> flow_flagged;  // per FlowId
};

// Everything a per-epoch allocation decision reads. Vectors are dense over
// LinkId / FlowId; capacity is the allocatable share per link.
struct AllocInputs {
  const std::vector<Flow>* flows = nullptr;
  const LinkFlowSets* sets = nullptr;
  const std::vector<LinkKind>* kinds = nullptr;
  const std::vector<double>* capacity = nullptr;
  const std::vector<FlowState>* states = nullptr;
  const std::vector<double>* prior_rates = nullptr;
  double delta_t = 0.0;
};

// Flags links whose member flows show standing backlog (send side for
// uplinks and fabric links, either side for downlinks) or whose measured
// aggregate carry reached demand_factor * capacity. prior rates are part of
// the telemetry snapshot but the rule is fully determined by flow states.
BottleneckSets detect_bottlenecks(const AllocInputs& in);

// Splits capacity so every flow sees the same expected transfer time for its
// pending work: x_f = C * w_f / sum(w). Weights must be positive (callers
// floor them via UplinkWeight::effective()).
std::vector<double> solve_uplink(const std::vector<double>& weights,
                                 double capacity);

// Equalizes receiver drain time (backlog + x*dt) / p across member flows,
// dropping flows whose drain time already exceeds the water level; the whole
// capacity is always assigned. Residual from floating-point drift is
// redistributed proportionally to p over positive-rate flows.
std::vector<double> solve_downlink(const std::vector<double>& recv_backlog,
                                   const std::vector<double>& proc_rate,
                                   double capacity, double delta_t);

// Pointwise minimum of an uplink and a downlink grant for the same flow set.
// NaN marks "not granted by this side"; a flow granted on one side only is
// an error.
std::vector<double> combine_min(const std::vector<double>& x_up,
                                const std::vector<double>& x_down);

// Proportionally shrinks rates on every listed link whose member sum exceeds
// capacity; a flow crossing several overloaded links keeps the smallest
// candidate. Never increases a rate.
void scale_to_fit(std::vector<double>& rate,
                  const std::vector<LinkId>& link_ids, const LinkFlowSets& sets,
                  const std::vector<double>& capacity);

// Hands unused capacity back to member flows, proportional to their current
// rate (equal split when all members sit at zero), respecting every link on
// each flow's route. Runs up to AllocTuning::backfill_passes rounds.
void backfill(std::vector<double>& rate, const std::vector<Flow>& flows,
              const LinkFlowSets& sets, const std::vector<double>& capacity);

// One full allocation decision: detect, solve flagged uplinks/downlinks,
// min-combine, rescale overloaded fabric links, clamp to feasibility
// everywhere, then backfill. Flows on no flagged link keep their measured
// demand (volume/dt + send backlog/dt).
AllocationVector allocate_step(const AllocInputs& in, double epoch_time);

// Progressive-filling max-min fairness over the same inputs, honoring
// per-flow demands (use +inf for a fully backlogged flow).
std::vector<double> maxmin_baseline(const std::vector<Flow>& flows,
                                    const LinkFlowSets& sets,
                                    const std::vector<double>& capacity,
                                    const std::vector<double>& demand);

// Largest per-link overshoot (sum of member rates minus capacity); a
// feasible allocation stays at or below AllocTuning::slack.
double max_link_overshoot(const std::vector<double>& rate,
                          const LinkFlowSets& sets,
                          const std::vector<double>& capacity);

}  // namespace streamsim
