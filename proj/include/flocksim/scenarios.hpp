#pragma once

#include "flocksim/core.hpp"

#include <cstdint>
#include <random>

namespace flocksim {

/// Uniform double in [lo, hi) from the top 53 bits of a 64-bit Mersenne
/// Twister draw. Bit-identical on every platform, unlike
/// std::uniform_real_distribution.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Thirteen agents in the plane, malicious agent 6 with k = (0.8, 0, 450000),
/// leaders 2, 5, 7, 10 on a centred parallelogram, two followers chained
/// outward from each leader. Speeds in (27, 35) m/s, headings in
/// (pi/6, pi/4), drawn from `seed`.
ScenarioConfig reference_scenario(std::uint64_t seed = 2023);

/// Reference layout with a random rotation, jittered positions, a shared
/// flock velocity plus small per-agent perturbations, and malicious gains
/// drawn inside the configured gain bounds.
ScenarioConfig randomized_scenario(std::uint64_t seed);

/// Seven agents on a hexagonal wheel running the plain flocking law, the
/// designated malicious agent with k = (1, 1, 1). Speeds in (0, 1) m/s.
ScenarioConfig baseline_scenario(std::uint64_t seed = 7);

/// Four agents in a line where the malicious agent (id 0, reference gains)
/// has a single neighbor. The normal agents run the plain flocking law since
/// no containment polygon exists for one neighbor.
ScenarioConfig single_neighbor_scenario(std::uint64_t seed = 11);

}  // namespace flocksim
