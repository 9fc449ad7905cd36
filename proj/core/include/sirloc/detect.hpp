#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sirloc/graph.hpp"

namespace sirloc {

struct DetectionResult {
  std::int32_t estimator = -1;
  std::vector<std::int32_t> candidates;   // sorted; the set S
  std::int32_t min_eccentricity = 0;
  std::vector<std::int64_t> tie_scores;   // sum_i t_ui, parallel to candidates
  std::int32_t rounds = 0;
  std::vector<std::int64_t> messages_per_round;  // empty for the closed-form engine
  // arrival_times[u][k] = round at which candidate u first saw the k-th
  // infected id; filled only when requested (test instrumentation).
  std::vector<std::vector<std::int32_t>> arrival_times;
};

struct RiOptions {
  bool record_arrivals = false;
};

// Round-synchronous flooding of infected-node ids (the literal protocol).
// Terminates at the first round where some node holds all |I| ids.
DetectionResult reverse_infection(const Graph& g, const Snapshot& snap,
                                  std::mt19937_64& rng, const RiOptions& opts = {});

// Same result computed by shortest-path arithmetic instead of message
// passing: double-BFS center finding on trees, per-infected BFS otherwise.
// messages_per_round is left empty. Equality with reverse_infection is
// asserted in the tests.
DetectionResult ri_estimate(const Graph& g, const Snapshot& snap, std::mt19937_64& rng);

// Node minimizing the sum of distances to all infected nodes (maximum
// infection closeness); ties broken uniformly.
std::int32_t closeness_estimator(const Graph& g, const Snapshot& snap, std::mt19937_64& rng);

std::int32_t random_guess(const Graph& g, std::mt19937_64& rng);

}  // namespace sirloc
