#include "streamsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace streamsim {

std::vector<double> zipf_masses(int key_count, double skew) {
  if (key_count < 1)
    throw std::invalid_argument("zipf_masses: key_count must be >= 1");
  std::vector<double> m(key_count);
  double total = 0;
  for (int k = 0; k < key_count; k++) {
    m[k] = std::pow(static_cast<double>(k + 1), -skew);
    total += m[k];
  }
  for (auto& v : m) v /= total;
  return m;
}

uint64_t Rng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::poisson(double mean) {
  if (mean < 0) throw std::invalid_argument("poisson: negative mean");
  if (mean == 0) return 0;
  // Knuth multiplication below 30; normal approximation above keeps the
  // per-step cost bounded for fast sources.
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      k++;
      p *= next_unit();
    } while (p > limit);
    return k - 1;
  }
  const double u1 = std::max(next_unit(), 1e-12);
  const double u2 = next_unit();
  const double gauss =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  const double v = mean + std::sqrt(mean) * gauss + 0.5;
  return v < 0 ? 0 : static_cast<int>(v);
}

int Rng::pick(const std::vector<double>& cdf) {
  const double u = next_unit();
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return static_cast<int>(cdf.size()) - 1;
  return static_cast<int>(it - cdf.begin());
}

SourceEmitter::SourceEmitter(uint64_t seed, double rate, int key_count,
                             double skew, bool poisson)
    : rng_(seed), rate_(rate), poisson_(poisson) {
  if (rate < 0) throw std::invalid_argument("SourceEmitter: negative rate");
  if (key_count > 1) {
    auto masses = zipf_masses(key_count, skew);
    key_cdf_.resize(masses.size());
    double acc = 0;
    for (size_t k = 0; k < masses.size(); k++) {
      acc += masses[k];
      key_cdf_[k] = acc;
    }
  }
}

void SourceEmitter::generate(double t0, double t1, std::vector<Emission>& out) {
  if (rate_ <= 0) return;
  const size_t base = out.size();
  if (poisson_) {
    const int n = rng_.poisson(rate_ * (t1 - t0));
    for (int i = 0; i < n; i++)
      out.push_back({t0 + rng_.next_unit() * (t1 - t0), 0});
    std::sort(out.begin() + base, out.end(),
              [](const Emission& a, const Emission& b) { return a.time < b.time; });
  } else {
    const double gap = 1.0 / rate_;
    if (next_deterministic_ < t0) next_deterministic_ = t0;
    while (next_deterministic_ < t1) {
      out.push_back({next_deterministic_, 0});
      next_deterministic_ += gap;
    }
  }
  if (!key_cdf_.empty())
    for (size_t i = base; i < out.size(); i++) out[i].key = rng_.pick(key_cdf_);
}

}  // namespace streamsim
