#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sirloc/graph.hpp"
#include "sirloc/sir.hpp"

namespace sirloc {

enum class Scenario { small_tree, regular_tree, binomial_tree, network_file, distance_vs_t };
enum class Algo { ri, cc, mle, osp, random_guess };

const char* to_string(Scenario s);
const char* to_string(Algo a);

struct ExperimentConfig {
  Scenario scenario = Scenario::regular_tree;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  std::vector<Algo> algorithms;

  // Scenario parameter grid. Meaning depends on the scenario:
  //   small_tree / regular_tree : node degree of the regular tree
  //   binomial_tree             : success probability beta
  //   distance_vs_t             : fixed horizon t
  //   network_file              : unused (single run)
  std::vector<double> grid;

  int gprime = 10;        // binomial_tree trial count per node
  int child_degree = 3;   // distance_vs_t tree shape (g such that g*q > 1)

  double q_min = 0.0, q_max = 1.0;
  std::optional<double> q_fixed;
  std::optional<double> p_fixed;  // default rule: p ~ U(0, q)
  int t_min = 3, t_max = 20;

  std::int64_t count_min = 1;       // accepted range of ever-infected nodes
  std::int64_t count_max = 500;
  std::int64_t retry_budget = 10'000;

  int mle_t_max = 8;
  std::size_t mle_node_cap = 10;

  std::string network_path;  // network_file scenario
  int threads = 1;
};

// Defaults for each scenario as described by the experiment protocols.
ExperimentConfig default_config(Scenario scenario);

// Flat key=value config file; '#' starts a comment. Unknown keys are a
// config error.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct AlgoOutcome {
  Algo algo;
  std::int32_t estimate = -1;
  std::int32_t distance = 0;          // hops to the true source
  std::int32_t candidate_count = 1;   // RI candidate-set size, 1 otherwise
  bool candidates_contain_source = false;
  double wall_ms = 0.0;
};

struct TrialRecord {
  std::int64_t trial = 0;
  double q = 0.0, p = 0.0;
  std::int32_t t = 0;
  std::int32_t source = 0;
  std::int64_t infected_count = 0;  // infected + recovered at the snapshot
  std::vector<AlgoOutcome> outcomes;
};

struct AlgoSummary {
  Algo algo;
  std::int64_t trials = 0;
  double detect_rate = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // binomial 95% CI (Wilson)
  double mean_dist = 0.0;
  double median_dist = 0.0;
  std::vector<std::int64_t> hop_histogram;  // counts per hop 0..max
  double center_rate = 0.0;  // RI only: candidate set contains the source
};

struct Summary {
  std::vector<AlgoSummary> per_algo;
};

Summary summarize(const std::vector<TrialRecord>& records);

struct GridResult {
  double param = 0.0;
  std::vector<TrialRecord> records;
  Summary summary;
};

struct ExperimentResult {
  std::vector<GridResult> grid_results;
};

// Context shared by the trials of one grid point (an immutable loaded
// network, or nothing for generated trees).
TrialRecord run_trial(const ExperimentConfig& cfg, double param, const Graph* network,
                      std::size_t param_index, std::int64_t trial_index);

// Deterministic in (config, seed) regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// trials_<param>.csv, summary.csv, hist_<param>_<algo>.csv under out_dir.
void write_experiment_csv(const ExperimentResult& result, const ExperimentConfig& cfg,
                          const std::string& out_dir);

}  // namespace sirloc
