#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "streamsim/app_graph.hpp"

namespace streamsim {

// Per-flow measurements for one allocation interval, all in MB.
struct FlowState {
  double L_s_start = 0.0;  // sender backlog when the interval began
  double L_r_start = 0.0;  // receiver backlog when the interval began
  double volume = 0.0;     // bytes that crossed the route in the interval
  double L_s_end = 0.0;    // sender backlog now
  double L_r_end = 0.0;    // receiver backlog now
  double interval = 0.0;   // seconds covered
};

// Raw per-interval weight driving the uplink share of a flow.
struct UplinkWeight {
  double raw = 0.0;
  double effective() const;
  static UplinkWeight from_state(const FlowState& s);
};

// Receiver consumption rate (MB/s) observed over the interval.
struct ProcessingRate {
  double raw = 0.0;
  double effective() const;
  static ProcessingRate from_state(const FlowState& s);
};

// Wall-clock bookkeeping for sampling vs allocation periods.
struct IntervalClock {
  double sample_period = 1.0;
  double alloc_period = 5.0;

  void validate() const;  // sample <= alloc, alloc an integer multiple
  bool is_alloc_boundary(int64_t step) const;
  int64_t steps_per_epoch() const;
};

// Neumaier-compensated running sum. The byte books accumulate millions of
// small tuple events onto totals in the GB range and are then differenced
// against independently kept balances; plain doubles drift by whole
// micro-bytes over a long run, compensation keeps the residual at ulp scale.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Pure accounting over the byte events the engine reports. Backlogs are
// derived from cumulative counters, so the sender/receiver conservation
// identities hold by construction; the engine's queues are cross-checked
// against these numbers in tests.
class FlowProfiler {
 public:
  void reset(int flow_count);

  void on_generated(FlowId f, double mb);   // entered the send queue
  void on_transferred(FlowId f, double mb); // crossed the route
  void on_processed(FlowId f, double mb);   // consumed by the receiver

  double send_backlog(FlowId f) const;
  double recv_backlog(FlowId f) const;

  void begin_interval(double t);
  FlowState end_interval(FlowId f, double t_end) const;

  // Bytes generated/processed inside the current interval (for tests).
  double generated_in_interval(FlowId f) const;
  double processed_in_interval(FlowId f) const;

  int flow_count() const { return static_cast<int>(cum_gen_.size()); }
  double interval_start() const { return interval_start_; }

 private:
  std::vector<CompensatedSum> cum_gen_, cum_vol_, cum_proc_;
  std::vector<double> start_gen_, start_vol_, start_proc_;
  std::vector<double> start_send_, start_recv_;
  double interval_start_ = 0.0;
};

}  // namespace streamsim
