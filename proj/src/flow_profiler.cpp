#include "streamsim/flow_profiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace streamsim {

namespace {
constexpr double kMinWeight = 1e-3;  // MB
constexpr double kMinRate = 1e-3;    // MB/s
}  // namespace

double UplinkWeight::effective() const { return std::max(raw, kMinWeight); }

UplinkWeight UplinkWeight::from_state(const FlowState& s) {
  return {s.volume + 2.0 * s.L_s_end - s.L_s_start};
}

double ProcessingRate::effective() const { return std::max(raw, kMinRate); }

ProcessingRate ProcessingRate::from_state(const FlowState& s) {
  if (s.interval <= 0)
    throw std::invalid_argument("ProcessingRate: non-positive interval");
  return {(s.volume - s.L_r_end + s.L_r_start) / s.interval};
}

void IntervalClock::validate() const {
  if (sample_period <= 0 || alloc_period <= 0)
    throw std::invalid_argument("IntervalClock: periods must be > 0");
  if (sample_period > alloc_period)
    throw std::invalid_argument("IntervalClock: sample_period > alloc_period");
  const double ratio = alloc_period / sample_period;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument(
        "IntervalClock: alloc_period must be an integer multiple of sample_period");
}

int64_t IntervalClock::steps_per_epoch() const {
  return static_cast<int64_t>(std::llround(alloc_period / sample_period));
}

bool IntervalClock::is_alloc_boundary(int64_t step) const {
  return step % steps_per_epoch() == 0;
}

void FlowProfiler::reset(int flow_count) {
  cum_gen_.assign(flow_count, {});
  cum_vol_.assign(flow_count, {});
  cum_proc_.assign(flow_count, {});
  start_gen_.assign(flow_count, 0.0);
  start_vol_.assign(flow_count, 0.0);
  start_proc_.assign(flow_count, 0.0);
  start_send_.assign(flow_count, 0.0);
  start_recv_.assign(flow_count, 0.0);
  interval_start_ = 0.0;
}

void FlowProfiler::on_generated(FlowId f, double mb) { cum_gen_[f].add(mb); }
void FlowProfiler::on_transferred(FlowId f, double mb) { cum_vol_[f].add(mb); }
void FlowProfiler::on_processed(FlowId f, double mb) { cum_proc_[f].add(mb); }

double FlowProfiler::send_backlog(FlowId f) const {
  return cum_gen_[f].value() - cum_vol_[f].value();
}

double FlowProfiler::recv_backlog(FlowId f) const {
  return cum_vol_[f].value() - cum_proc_[f].value();
}

void FlowProfiler::begin_interval(double t) {
  interval_start_ = t;
  for (size_t f = 0; f < cum_gen_.size(); f++) {
    start_gen_[f] = cum_gen_[f].value();
    start_vol_[f] = cum_vol_[f].value();
    start_proc_[f] = cum_proc_[f].value();
    start_send_[f] = send_backlog(static_cast<FlowId>(f));
    start_recv_[f] = recv_backlog(static_cast<FlowId>(f));
  }
}

FlowState FlowProfiler::end_interval(FlowId f, double t_end) const {
  if (t_end <= interval_start_)
    throw std::invalid_argument("end_interval: interval must have positive length");
  FlowState s;
  s.L_s_start = start_send_[f];
  s.L_r_start = start_recv_[f];
  s.volume = cum_vol_[f].value() - start_vol_[f];
  s.L_s_end = send_backlog(f);
  s.L_r_end = recv_backlog(f);
  s.interval = t_end - interval_start_;
  return s;
}

double FlowProfiler::generated_in_interval(FlowId f) const {
  return cum_gen_[f].value() - start_gen_[f];
}

double FlowProfiler::processed_in_interval(FlowId f) const {
  return cum_proc_[f].value() - start_proc_[f];
}

}  // namespace streamsim
