#pragma once

#include <cstdint>
#include <vector>

namespace streamsim {

// Normalized Zipf probabilities over keys 0..key_count-1, mass of key k
// proportional to (k+1)^-skew. skew 0 is uniform.
std::vector<double> zipf_masses(int key_count, double skew);

// Small self-contained generator (splitmix64 core) so emission schedules are
// reproducible across platforms and independent of library internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next_u64();
  double next_unit();                   // [0, 1)
  int poisson(double mean);
  int pick(const std::vector<double>& cdf);  // index via inverse CDF

 private:
  uint64_t state_;
};

struct Emission {
  double time = 0.0;
  int key = 0;
};

// Source emissions for one instance over [t0, t1). Poisson draws a count
// per call and spreads arrivals uniformly; deterministic mode spaces them
// evenly. Keys follow the Zipf law; key_cdf may be empty for keyless
// sources (key 0).
class SourceEmitter {
 public:
  SourceEmitter(uint64_t seed, double rate, int key_count, double skew,
                bool poisson);

  // Appends emissions in [t0, t1), sorted by time.
  void generate(double t0, double t1, std::vector<Emission>& out);

 private:
  Rng rng_;
  double rate_;
  bool poisson_;
  double next_deterministic_ = 0.0;
  std::vector<double> key_cdf_;
};

}  // namespace streamsim
