#include "streamsim/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace streamsim {

namespace {
constexpr double kEps = 1e-12;

double member_sum(const std::vector<double>& rate,
                  const std::vector<FlowId>& members) {
  double s = 0;
  for (FlowId f : members) s += rate[f];
  return s;
}
}  // namespace

BottleneckSets detect_bottlenecks(const AllocInputs& in) {
  const auto& sets = *in.sets;
  const auto& kinds = *in.kinds;
  const auto& states = *in.states;
  if (in.delta_t <= 0)
    throw std::invalid_argument("detect_bottlenecks: delta_t must be > 0");

  BottleneckSets out;
  out.link_flagged.assign(sets.members.size(), 0);
  out.flow_flagged.assign(states.size(), 0);

  for (size_t l = 0; l < sets.members.size(); l++) {
    const auto& members = sets.members[l];
    if (members.empty()) continue;
    bool flagged = false;
    double carried = 0;
    for (FlowId f : members) {
      const FlowState& s = states[f];
      carried += s.volume / in.delta_t;
      if (s.L_s_end > kEps) flagged = true;
      if (kinds[l] == LinkKind::downlink && s.L_r_end > kEps) flagged = true;
    }
    if (carried >= AllocTuning::demand_factor * (*in.capacity)[l])
      flagged = true;
    if (!flagged) continue;
    out.link_flagged[l] = 1;
    const LinkId id = static_cast<LinkId>(l);
    switch (kinds[l]) {
      case LinkKind::uplink: out.uplinks.push_back(id); break;
      case LinkKind::downlink: out.downlinks.push_back(id); break;
      default: out.internal.push_back(id); break;
    }
    for (FlowId f : members) out.flow_flagged[f] = 1;
  }
  return out;
}

std::vector<double> solve_uplink(const std::vector<double>& weights,
                                 double capacity) {
  if (weights.empty())
    throw std::invalid_argument("solve_uplink: empty flow set");
  if (capacity <= 0)
    throw std::invalid_argument("solve_uplink: capacity must be > 0");
  double total = 0;
  for (double w : weights) {
    if (w <= 0)
      throw std::invalid_argument("solve_uplink: weights must be positive");
    total += w;
  }
  std::vector<double> x(weights.size());
  for (size_t i = 0; i < weights.size(); i++)
    x[i] = capacity * weights[i] / total;
  return x;
}

std::vector<double> solve_downlink(const std::vector<double>& recv_backlog,
                                   const std::vector<double>& proc_rate,
                                   double capacity, double delta_t) {
  const size_t n = recv_backlog.size();
  if (n == 0) throw std::invalid_argument("solve_downlink: empty flow set");
  if (proc_rate.size() != n)
    throw std::invalid_argument("solve_downlink: size mismatch");
  if (capacity <= 0 || delta_t <= 0)
    throw std::invalid_argument("solve_downlink: capacity and delta_t must be > 0");
  for (size_t i = 0; i < n; i++) {
    if (proc_rate[i] <= 0)
      throw std::invalid_argument("solve_downlink: rates must be positive");
    if (recv_backlog[i] < 0)
      throw std::invalid_argument("solve_downlink: negative backlog");
  }

  std::vector<char> active(n, 1);
  std::vector<double> x(n, 0.0);
  while (true) {
    double sum_L = 0, sum_p = 0;
    for (size_t i = 0; i < n; i++) {
      if (!active[i]) continue;
      sum_L += recv_backlog[i];
      sum_p += proc_rate[i];
    }
    const double theta = (capacity * delta_t + sum_L) / sum_p;
    bool dropped = false;
    for (size_t i = 0; i < n; i++) {
      if (!active[i]) continue;
      if (theta * proc_rate[i] - recv_backlog[i] < 0) {
        active[i] = 0;
        dropped = true;
      }
    }
    if (dropped) continue;
    for (size_t i = 0; i < n; i++)
      x[i] = active[i] ? (theta * proc_rate[i] - recv_backlog[i]) / delta_t : 0.0;
    break;
  }

  // The water level assigns exactly C in exact arithmetic; mop up drift
  // proportionally to p over flows that stayed in.
  double assigned = 0;
  for (double v : x) assigned += v;
  double residual = capacity - assigned;
  if (std::abs(residual) > kEps) {
    double sum_p = 0;
    for (size_t i = 0; i < n; i++)
      if (x[i] > 0) sum_p += proc_rate[i];
    if (sum_p > 0)
      for (size_t i = 0; i < n; i++)
        if (x[i] > 0) x[i] += residual * proc_rate[i] / sum_p;
  }
  return x;
}

std::vector<double> combine_min(const std::vector<double>& x_up,
                                const std::vector<double>& x_down) {
  if (x_up.size() != x_down.size())
    throw std::invalid_argument("combine_min: size mismatch");
  std::vector<double> x(x_up.size());
  for (size_t i = 0; i < x.size(); i++) {
    const bool has_u = !std::isnan(x_up[i]);
    const bool has_d = !std::isnan(x_down[i]);
    if (has_u != has_d)
      throw std::invalid_argument(
          "combine_min: flow granted on one side but missing from the other");
    x[i] = has_u ? std::min(x_up[i], x_down[i])
                 : std::numeric_limits<double>::quiet_NaN();
  }
  return x;
}

void scale_to_fit(std::vector<double>& rate,
                  const std::vector<LinkId>& link_ids, const LinkFlowSets& sets,
                  const std::vector<double>& capacity) {
  std::vector<double> factor(rate.size(), 1.0);
  bool any = false;
  for (LinkId l : link_ids) {
    const double demand = member_sum(rate, sets.members[l]);
    if (demand <= capacity[l] * (1.0 + AllocTuning::slack)) continue;
    const double s = capacity[l] / demand;
    for (FlowId f : sets.members[l]) factor[f] = std::min(factor[f], s);
    any = true;
  }
  if (!any) return;
  for (size_t f = 0; f < rate.size(); f++) rate[f] *= factor[f];
}

void backfill(std::vector<double>& rate, const std::vector<Flow>& flows,
              const LinkFlowSets& sets, const std::vector<double>& capacity) {
  const size_t link_count = sets.members.size();
  std::vector<double> slack(link_count, 0.0), used(link_count, 0.0);
  std::vector<double> grant(rate.size(), 0.0);

  for (int pass = 0; pass < AllocTuning::backfill_passes; pass++) {
    bool any_slack = false;
    for (size_t l = 0; l < link_count; l++) {
      used[l] = member_sum(rate, sets.members[l]);
      slack[l] = std::max(0.0, capacity[l] - used[l]);
      if (!sets.members[l].empty() && slack[l] > kEps) any_slack = true;
    }
    if (!any_slack) break;

    bool granted = false;
    for (const Flow& f : flows) {
      grant[f.id] = 0.0;
      if (f.is_internal || f.route.link_ids.empty()) continue;
      double offer = std::numeric_limits<double>::infinity();
      for (LinkId l : f.route.link_ids) {
        double share;
        if (used[l] > kEps)
          share = slack[l] * rate[f.id] / used[l];
        else
          share = slack[l] / static_cast<double>(sets.members[l].size());
        offer = std::min(offer, share);
      }
      if (offer > kEps) {
        grant[f.id] = offer;
        granted = true;
      }
    }
    if (!granted) break;
    for (const Flow& f : flows) rate[f.id] += grant[f.id];
  }
}

AllocationVector allocate_step(const AllocInputs& in, double epoch_time) {
  const auto& flows = *in.flows;
  const auto& states = *in.states;
  const auto& capacity = *in.capacity;
  const double dt = in.delta_t;

  BottleneckSets b = detect_bottlenecks(in);

  AllocationVector out;
  out.epoch_time = epoch_time;
  out.rate.assign(flows.size(), 0.0);

  // Flows under no pressure run at their measured demand.
  for (const Flow& f : flows) {
    if (f.is_internal) continue;
    const FlowState& s = states[f.id];
    out.rate[f.id] = (s.volume + s.L_s_end) / dt;
  }

  // Per-flow grants from each flagged edge link.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> grant_up(flows.size(), nan), grant_down(flows.size(), nan);

  for (LinkId u : b.uplinks) {
    const auto& members = in.sets->members[u];
    std::vector<double> w(members.size());
    for (size_t i = 0; i < members.size(); i++)
      w[i] = UplinkWeight::from_state(states[members[i]]).effective();
    auto x = solve_uplink(w, capacity[u]);
    for (size_t i = 0; i < members.size(); i++) grant_up[members[i]] = x[i];
  }
  for (LinkId d : b.downlinks) {
    const auto& members = in.sets->members[d];
    std::vector<double> L(members.size()), p(members.size());
    for (size_t i = 0; i < members.size(); i++) {
      L[i] = states[members[i]].L_r_end;
      p[i] = ProcessingRate::from_state(states[members[i]]).effective();
    }
    auto x = solve_downlink(L, p, capacity[d], dt);
    for (size_t i = 0; i < members.size(); i++) grant_down[members[i]] = x[i];
  }

  for (const Flow& f : flows) {
    if (f.is_internal) continue;
    const bool has_u = !std::isnan(grant_up[f.id]);
    const bool has_d = !std::isnan(grant_down[f.id]);
    if (has_u && has_d)
      out.rate[f.id] = std::min(grant_up[f.id], grant_down[f.id]);
    else if (has_u)
      out.rate[f.id] = grant_up[f.id];
    else if (has_d)
      out.rate[f.id] = grant_down[f.id];
    // else: flagged fabric link only, or unflagged everywhere; demand stands.
  }

  // Fabric links take the proportional trim, then a global pass keeps every
  // remaining link (e.g. an unflagged downlink crossed by boosted flows)
  // inside capacity before slack is handed back.
  scale_to_fit(out.rate, b.internal, *in.sets, capacity);
  std::vector<LinkId> all_links(in.sets->members.size());
  for (size_t l = 0; l < all_links.size(); l++)
    all_links[l] = static_cast<LinkId>(l);
  scale_to_fit(out.rate, all_links, *in.sets, capacity);
  backfill(out.rate, flows, *in.sets, capacity);
  return out;
}

std::vector<double> maxmin_baseline(const std::vector<Flow>& flows,
                                    const LinkFlowSets& sets,
                                    const std::vector<double>& capacity,
                                    const std::vector<double>& demand) {
  std::vector<double> x(flows.size(), 0.0);
  std::vector<char> active(flows.size(), 0);
  for (const Flow& f : flows) {
    if (f.is_internal) continue;
    if (demand[f.id] < 0)
      throw std::invalid_argument("maxmin_baseline: negative demand");
    active[f.id] = demand[f.id] > kEps;
  }

  while (true) {
    double step = std::numeric_limits<double>::infinity();
    bool any_active = false;
    for (size_t l = 0; l < sets.members.size(); l++) {
      int n = 0;
      double used = 0;
      for (FlowId f : sets.members[l]) {
        used += x[f];
        if (active[f]) n++;
      }
      if (n == 0) continue;
      any_active = true;
      step = std::min(step, std::max(0.0, capacity[l] - used) / n);
    }
    for (const Flow& f : flows)
      if (active[f.id]) step = std::min(step, demand[f.id] - x[f.id]);
    if (!any_active) break;

    for (const Flow& f : flows)
      if (active[f.id]) x[f.id] += step;

    // Freeze flows that met demand or sit on a saturated link.
    for (const Flow& f : flows)
      if (active[f.id] && x[f.id] >= demand[f.id] - 1e-12) active[f.id] = 0;
    for (size_t l = 0; l < sets.members.size(); l++) {
      double used = 0;
      bool has_active = false;
      for (FlowId f : sets.members[l]) {
        used += x[f];
        if (active[f]) has_active = true;
      }
      if (has_active && used >= capacity[l] - 1e-12)
        for (FlowId f : sets.members[l]) active[f] = 0;
    }
  }
  return x;
}

double max_link_overshoot(const std::vector<double>& rate,
                          const LinkFlowSets& sets,
                          const std::vector<double>& capacity) {
  double worst = 0;
  for (size_t l = 0; l < sets.members.size(); l++)
    worst = std::max(worst, member_sum(rate, sets.members[l]) - capacity[l]);
  return worst;
}

}  // namespace streamsim
