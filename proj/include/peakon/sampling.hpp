#pragma once

#include <cstdint>
#include <random>

#include "peakon/state.hpp"

namespace peakon {

/// Independent generator for sample `index` of a sweep seeded with `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

struct SamplingRanges {
  double gap_min = 0.1;
  double gap_max = 2.0;
  double p_min = -2.0;
  double p_max = 2.0;
};

/// Ordered state with consecutive gaps uniform in [gap_min, gap_max], the
/// centre of mass of q near the origin, and momenta uniform in [p_min, p_max].
PeakonState random_state(std::size_t n, std::mt19937_64& rng, const SamplingRanges& ranges = {});

}  // namespace peakon
