#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sirloc/graph.hpp"
#include "sirloc/sir.hpp"

namespace sirloc {

struct PathScore {
  std::int32_t root = -1;
  std::int32_t t_star = 0;
  double log_prob = 0.0;       // -inf when infeasible
  bool feasible = true;
  SirTrace witness;            // an argmax trace; empty when infeasible
};

// Duration of the most probable sample path rooted at `root`; equals the
// infection eccentricity. Throws not-a-tree on non-tree input.
std::int32_t optimal_time(const Graph& tree, const Snapshot& snap, std::int32_t root);

enum class HealthyMode {
  closed_form,  // healthy subtrees use the infect-earliest/recover-next recursion
  full_dp,      // healthy subtrees run the general state DP
};

// Maximum-probability sample path rooted at `root` with horizon fixed to
// optimal_time, computed by dynamic programming over per-node
// (infection slot, recovery slot) states.
PathScore optimal_path_prob(const Graph& tree, const Snapshot& snap, std::int32_t root,
                            const SirParams& params,
                            HealthyMode mode = HealthyMode::closed_form);

// Exhaustive enumeration oracle over all valid traces with horizon `t`.
// feasible = false when no trace is consistent with the snapshot.
PathScore brute_force_osp(const Graph& g, const Snapshot& snap, std::int32_t root,
                          const SirParams& params, std::int32_t t,
                          std::size_t node_cap = 8, std::int32_t t_cap = 4);

enum class MleTimeRule { max_over_t, sum_over_t };
enum class MleMethod {
  automatic,  // tree DP on trees, forward propagation otherwise
  forward,    // exact 3^N-state Markov chain propagation
  tree_dp,    // sum-over-paths DP (trees only)
};

struct MleOptions {
  MleTimeRule time_rule = MleTimeRule::max_over_t;
  MleMethod method = MleMethod::automatic;
  std::size_t node_cap = 10;  // forward state space is 3^N
};

struct MleResult {
  std::int32_t estimator = -1;
  std::vector<double> scores;  // per node
};

// Exact snapshot likelihood per candidate source, scored over t in
// [0, t_max] by the configured time rule; ties broken uniformly.
MleResult mle_estimator(const Graph& g, const Snapshot& snap, const SirParams& params,
                        std::int32_t t_max, std::mt19937_64& rng,
                        const MleOptions& opts = {});

// Exact Pr(F(X(t)) = Y | source = root) on a tree (sum-over-paths DP).
double tree_snapshot_likelihood(const Graph& tree, const Snapshot& snap,
                                std::int32_t root, const SirParams& params,
                                std::int32_t t);

enum class ScanMode { centers_only, full_scan };

struct RankingEntry {
  std::int32_t root;
  std::int32_t t_star;
  double log_prob;
};

struct SamplePathResult {
  std::int32_t estimator = -1;
  std::vector<RankingEntry> ranking;  // descending log_prob, ties by index
};

// centers_only evaluates the Jordan infection centers (the product
// behavior); full_scan evaluates every root and exists for validation.
SamplePathResult sample_path_estimator(const Graph& tree, const Snapshot& snap,
                                       const SirParams& params,
                                       ScanMode mode = ScanMode::centers_only,
                                       HealthyMode healthy = HealthyMode::closed_form);

}  // namespace sirloc
