#include "peakon/sampling.hpp"

#include <numeric>
#include <vector>

namespace peakon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

PeakonState random_state(std::size_t n, std::mt19937_64& rng, const SamplingRanges& ranges) {
  std::uniform_real_distribution<double> gap(ranges.gap_min, ranges.gap_max);
  std::uniform_real_distribution<double> mom(ranges.p_min, ranges.p_max);
  std::vector<double> q(n), p(n);
  q[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) q[i] = q[i - 1] - gap(rng);
  const double mean = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(n);
  for (auto& x : q) x -= mean;
  for (auto& x : p) x = mom(rng);
  return PeakonState::ordered(std::move(q), std::move(p));
}

}  // namespace peakon
