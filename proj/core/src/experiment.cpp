#include "sirloc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sirloc/detect.hpp"
#include "sirloc/error.hpp"
#include "sirloc/rng.hpp"
#include "sirloc/samplepath.hpp"

namespace sirloc {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::small_tree: return "small_tree";
    case Scenario::regular_tree: return "regular_tree";
    case Scenario::binomial_tree: return "binomial_tree";
    case Scenario::network_file: return "network_file";
    case Scenario::distance_vs_t: return "distance_vs_t";
  }
  return "?";
}

const char* to_string(Algo a) {
  switch (a) {
    case Algo::ri: return "ri";
    case Algo::cc: return "cc";
    case Algo::mle: return "mle";
    case Algo::osp: return "osp";
    case Algo::random_guess: return "random";
  }
  return "?";
}

namespace {

Scenario parse_scenario(const std::string& s) {
  for (Scenario sc : {Scenario::small_tree, Scenario::regular_tree, Scenario::binomial_tree,
                      Scenario::network_file, Scenario::distance_vs_t}) {
    if (s == to_string(sc)) return sc;
  }
  fail(ErrorKind::config, "unknown scenario '" + s + "'");
}

Algo parse_algo(const std::string& s) {
  for (Algo a : {Algo::ri, Algo::cc, Algo::mle, Algo::osp, Algo::random_guess}) {
    if (s == to_string(a)) return a;
  }
  fail(ErrorKind::config, "unknown algorithm '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig default_config(Scenario scenario) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  switch (scenario) {
    case Scenario::small_tree:
      cfg.grid = {3, 4};
      cfg.algorithms = {Algo::ri, Algo::cc, Algo::mle, Algo::osp};
      cfg.t_min = 3;
      cfg.t_max = 5;
      cfg.count_max = 100;
      break;
    case Scenario::regular_tree:
      cfg.grid = {4, 6, 8, 10};
      cfg.algorithms = {Algo::ri, Algo::cc};
      cfg.t_min = 3;
      cfg.t_max = 20;
      cfg.count_max = 500;
      break;
    case Scenario::binomial_tree:
      cfg.grid = {0.3, 0.5, 0.7};
      cfg.algorithms = {Algo::ri, Algo::cc};
      cfg.t_min = 3;
      cfg.t_max = 20;
      cfg.count_max = 500;
      break;
    case Scenario::network_file:
      cfg.grid = {0};
      cfg.algorithms = {Algo::ri, Algo::cc};
      cfg.q_max = 0.05;
      cfg.t_min = 3;
      cfg.t_max = 200;
      cfg.count_min = 50;
      cfg.count_max = 500;
      break;
    case Scenario::distance_vs_t:
      cfg.grid = {5, 10, 20};
      cfg.algorithms = {Algo::ri};
      cfg.q_fixed = 0.5;
      cfg.p_fixed = 0.2;
      cfg.child_degree = 3;
      cfg.count_max = 5'000'000;  // supercritical growth; cap only guards memory
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::config, "line " + std::to_string(lineno) + ": expected key=value");
    }
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  Scenario scenario = Scenario::regular_tree;
  for (const auto& [k, v] : pairs) {
    if (k == "scenario") scenario = parse_scenario(v);
  }
  ExperimentConfig cfg = default_config(scenario);

  const auto num = [](const std::string& k, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      fail(ErrorKind::config, "bad numeric value for '" + k + "': " + v);
    }
  };

  for (const auto& [k, v] : pairs) {
    if (k == "scenario") {
    } else if (k == "trials") {
      cfg.trials = static_cast<std::int64_t>(num(k, v));
    } else if (k == "seed") {
      cfg.seed = static_cast<std::uint64_t>(num(k, v));
    } else if (k == "algorithms") {
      cfg.algorithms.clear();
      for (const std::string& name : split_list(v)) cfg.algorithms.push_back(parse_algo(trim(name)));
    } else if (k == "grid") {
      cfg.grid.clear();
      for (const std::string& x : split_list(v)) cfg.grid.push_back(num(k, trim(x)));
    } else if (k == "gprime") {
      cfg.gprime = static_cast<int>(num(k, v));
    } else if (k == "child_degree") {
      cfg.child_degree = static_cast<int>(num(k, v));
    } else if (k == "q_min") {
      cfg.q_min = num(k, v);
    } else if (k == "q_max") {
      cfg.q_max = num(k, v);
    } else if (k == "q") {
      cfg.q_fixed = num(k, v);
    } else if (k == "p") {
      cfg.p_fixed = num(k, v);
    } else if (k == "t_min") {
      cfg.t_min = static_cast<int>(num(k, v));
    } else if (k == "t_max") {
      cfg.t_max = static_cast<int>(num(k, v));
    } else if (k == "count_min") {
      cfg.count_min = static_cast<std::int64_t>(num(k, v));
    } else if (k == "count_max") {
      cfg.count_max = static_cast<std::int64_t>(num(k, v));
    } else if (k == "retry_budget") {
      cfg.retry_budget = static_cast<std::int64_t>(num(k, v));
    } else if (k == "mle_t_max") {
      cfg.mle_t_max = static_cast<int>(num(k, v));
    } else if (k == "mle_node_cap") {
      cfg.mle_node_cap = static_cast<std::size_t>(num(k, v));
    } else if (k == "network_path") {
      cfg.network_path = v;
    } else if (k == "threads") {
      cfg.threads = static_cast<int>(num(k, v));
    } else {
      fail(ErrorKind::config, "unknown key '" + k + "'");
    }
  }

  if (cfg.trials < 1) fail(ErrorKind::config, "trials must be positive");
  if (cfg.threads < 1) fail(ErrorKind::config, "threads must be positive");
  if (cfg.grid.empty()) fail(ErrorKind::config, "grid must be non-empty");
  if (cfg.algorithms.empty()) fail(ErrorKind::config, "algorithms must be non-empty");
  if (cfg.t_min < 0 || cfg.t_min > cfg.t_max) fail(ErrorKind::config, "bad horizon range");
  if (cfg.count_min < 1 || cfg.count_min > cfg.count_max) fail(ErrorKind::config, "bad count range");
  if (cfg.scenario == Scenario::network_file && cfg.network_path.empty()) {
    fail(ErrorKind::config, "network_file scenario needs network_path");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config file: " + path);
  return parse_config(in);
}

namespace {

// Lazily materialized tree: a node's children are created the moment it is
// infected, so the finite portion in memory behaves exactly like the
// infinite tree up to the count cap.
struct GrownTrial {
  std::vector<std::vector<std::int32_t>> adj;
  std::vector<std::int32_t> t_infect, t_recover;
  std::int64_t ever = 0;
  bool aborted = false;
};

GrownTrial grow_and_simulate(const ExperimentConfig& cfg, double param, double q, double p,
                             std::int32_t t, std::mt19937_64& rng) {
  GrownTrial gt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Only ever-infected nodes are materialized. A node's still-susceptible
  // children are interchangeable, so each slot draws Binomial(remaining, q)
  // instead of flipping a coin per child. Healthy leaves never enter the
  // graph: on a tree they are strictly farther from every infected node than
  // their parent, so they can never be an RI or closeness argmin.
  std::vector<std::int32_t> slack;  // uninfected children still available
  const auto child_count = [&](std::int32_t u) -> std::int32_t {
    switch (cfg.scenario) {
      case Scenario::regular_tree: {
        const auto degree = static_cast<std::int32_t>(param);
        return u == 0 ? degree : degree - 1;
      }
      case Scenario::distance_vs_t:
        return cfg.child_degree;
      case Scenario::binomial_tree: {
        std::binomial_distribution<std::int32_t> d(cfg.gprime, param);
        return d(rng);
      }
      default:
        return 0;
    }
  };
  const auto materialize = [&](std::int32_t parent, std::int32_t s) {
    const auto v = static_cast<std::int32_t>(gt.adj.size());
    gt.adj.emplace_back();
    gt.t_infect.push_back(s);
    gt.t_recover.push_back(kNever);
    slack.push_back(child_count(v));
    if (parent >= 0) {
      gt.adj[static_cast<std::size_t>(parent)].push_back(v);
      gt.adj[static_cast<std::size_t>(v)].push_back(parent);
    }
    return v;
  };

  materialize(-1, 0);
  gt.ever = 1;

  std::vector<std::int32_t> active{0};  // infected, not recovered, in id order
  std::vector<std::int32_t> fresh;
  for (std::int32_t s = 1; s <= t && !active.empty(); ++s) {
    fresh.clear();
    for (std::int32_t u : active) {
      const std::int32_t avail = slack[static_cast<std::size_t>(u)];
      if (avail == 0) continue;
      std::binomial_distribution<std::int32_t> d(avail, q);
      const std::int32_t hits = d(rng);
      slack[static_cast<std::size_t>(u)] = avail - hits;
      gt.ever += hits;
      if (gt.ever > cfg.count_max) {
        gt.aborted = true;
        return gt;
      }
      for (std::int32_t k = 0; k < hits; ++k) fresh.push_back(materialize(u, s));
    }
    std::size_t keep = 0;
    for (std::int32_t u : active) {
      if (unit(rng) < p) {
        gt.t_recover[static_cast<std::size_t>(u)] = s;
      } else {
        active[keep++] = u;
      }
    }
    active.resize(keep);
    active.insert(active.end(), fresh.begin(), fresh.end());
  }
  return gt;
}

Graph small_tree_graph(double param) {
  const int degree = static_cast<int>(param);
  if (degree < 2) fail(ErrorKind::config, "small_tree degree must be at least 2");
  // Deep enough that the <=100 ever-infected acceptance filter keeps the
  // epidemic off the truncation boundary (degree 3 -> 190 nodes, degree 4 ->
  // 485 nodes). The exact-likelihood scorer stays feasible at this size
  // because trees use the per-root DP rather than full state propagation.
  const int depth = degree == 3 ? 6 : 5;
  return gen_regular_tree(degree - 1, depth);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, double param, const Graph* network,
                      std::size_t param_index, std::int64_t trial_index) {
  std::mt19937_64 rng =
      make_stream(cfg.seed, param_index, static_cast<std::uint64_t>(trial_index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const bool grown = cfg.scenario == Scenario::regular_tree ||
                     cfg.scenario == Scenario::binomial_tree ||
                     cfg.scenario == Scenario::distance_vs_t;

  Graph fixed;
  if (cfg.scenario == Scenario::small_tree) fixed = small_tree_graph(param);
  if (cfg.scenario == Scenario::network_file) {
    if (network == nullptr) fail(ErrorKind::config, "network scenario without a network");
    fixed = *network;
  }

  TrialRecord rec;
  rec.trial = trial_index;

  Graph graph;
  Snapshot snap;
  for (std::int64_t attempt = 0;; ++attempt) {
    if (attempt >= cfg.retry_budget) {
      fail(ErrorKind::infeasible_scenario, "retry budget exhausted while sampling a trial");
    }
    const double q = cfg.q_fixed ? *cfg.q_fixed : cfg.q_min + (cfg.q_max - cfg.q_min) * unit(rng);
    const double p = cfg.p_fixed ? *cfg.p_fixed : q * unit(rng);
    if (!(q > 0.0)) continue;
    std::int32_t t;
    if (cfg.scenario == Scenario::distance_vs_t) {
      t = static_cast<std::int32_t>(param);
    } else {
      std::uniform_int_distribution<std::int32_t> td(cfg.t_min, cfg.t_max);
      t = td(rng);
    }

    SirTrace trace;
    if (grown) {
      GrownTrial gt = grow_and_simulate(cfg, param, q, p, t, rng);
      if (gt.aborted) continue;
      if (gt.ever < cfg.count_min) continue;
      graph = Graph::from_adjacency(std::move(gt.adj));
      trace.t_infect = std::move(gt.t_infect);
      trace.t_recover = std::move(gt.t_recover);
      trace.horizon = t;
      trace.source = 0;
      rec.infected_count = gt.ever;
    } else {
      // small_tree models an unbounded regular tree truncated far from the
      // action: the source sits at the root and the ever-infected filter
      // keeps the epidemic off the truncation boundary. Network files have
      // no such symmetry, so the source is uniform there.
      std::int32_t source = 0;
      if (cfg.scenario != Scenario::small_tree) {
        std::uniform_int_distribution<std::int32_t> sd(
            0, static_cast<std::int32_t>(fixed.node_count()) - 1);
        source = sd(rng);
      }
      SirParams params{q, p};
      trace = simulate(fixed, source, params, t, rng);
      std::int64_t ever = 0;
      for (std::int32_t ti : trace.t_infect) ever += ti != kNever;
      if (ever < cfg.count_min || ever > cfg.count_max) continue;
      graph = fixed;
      rec.infected_count = ever;
    }
    snap = snapshot_of(trace);
    if (snap.infected.empty()) continue;

    rec.q = q;
    rec.p = p;
    rec.t = t;
    rec.source = trace.source;
    break;
  }

  const std::vector<std::int32_t> dist_from_source = bfs_distances(graph, rec.source);
  const SirParams params{rec.q, rec.p};

  for (Algo algo : cfg.algorithms) {
    AlgoOutcome out;
    out.algo = algo;
    const auto start = std::chrono::steady_clock::now();
    switch (algo) {
      case Algo::ri: {
        const DetectionResult r = ri_estimate(graph, snap, rng);
        out.estimate = r.estimator;
        out.candidate_count = static_cast<std::int32_t>(r.candidates.size());
        out.candidates_contain_source =
            std::binary_search(r.candidates.begin(), r.candidates.end(), rec.source);
        break;
      }
      case Algo::cc: {
        out.estimate = closeness_estimator(graph, snap, rng);
        break;
      }
      case Algo::mle: {
        MleOptions mo;
        mo.node_cap = cfg.mle_node_cap;
        out.estimate = mle_estimator(graph, snap, params, cfg.mle_t_max, rng, mo).estimator;
        break;
      }
      case Algo::osp: {
        out.estimate = sample_path_estimator(graph, snap, params).estimator;
        break;
      }
      case Algo::random_guess: {
        out.estimate = random_guess(graph, rng);
        break;
      }
    }
    out.wall_ms = elapsed_ms(start);
    out.distance = dist_from_source[static_cast<std::size_t>(out.estimate)];
    if (algo != Algo::ri) out.candidates_contain_source = out.distance == 0;
    rec.outcomes.push_back(out);
  }
  return rec;
}

Summary summarize(const std::vector<TrialRecord>& records) {
  Summary sum;
  if (records.empty()) return sum;

  for (const AlgoOutcome& out : records.front().outcomes) {
    AlgoSummary as;
    as.algo = out.algo;
    sum.per_algo.push_back(as);
  }

  for (std::size_t a = 0; a < sum.per_algo.size(); ++a) {
    AlgoSummary& as = sum.per_algo[a];
    std::vector<std::int32_t> dists;
    std::int64_t hits = 0, contains = 0;
    for (const TrialRecord& rec : records) {
      const AlgoOutcome& out = rec.outcomes.at(a);
      dists.push_back(out.distance);
      hits += out.distance == 0;
      contains += out.candidates_contain_source;
    }
    const auto n = static_cast<double>(dists.size());
    as.trials = static_cast<std::int64_t>(dists.size());
    as.detect_rate = static_cast<double>(hits) / n;
    as.center_rate = static_cast<double>(contains) / n;

    const double z = 1.959963984540054;  // 95% normal quantile
    const double phat = as.detect_rate;
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    as.ci_lo = std::max(0.0, center - half);
    as.ci_hi = std::min(1.0, center + half);

    double mean = 0.0;
    std::int32_t max_d = 0;
    for (std::int32_t d : dists) {
      mean += d;
      max_d = std::max(max_d, d);
    }
    as.mean_dist = mean / n;
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    as.median_dist = m % 2 == 1 ? dists[m / 2]
                                : (dists[m / 2 - 1] + dists[m / 2]) / 2.0;
    as.hop_histogram.assign(static_cast<std::size_t>(max_d) + 1, 0);
    for (std::int32_t d : dists) ++as.hop_histogram[static_cast<std::size_t>(d)];
  }
  return sum;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::optional<Graph> network;
  if (cfg.scenario == Scenario::network_file) {
    network = load_edge_list_file(cfg.network_path).graph;
  }

  ExperimentResult result;
  for (std::size_t pi = 0; pi < cfg.grid.size(); ++pi) {
    GridResult gr;
    gr.param = cfg.grid[pi];
    gr.records.resize(static_cast<std::size_t>(cfg.trials));

    const Graph* net = network ? &*network : nullptr;
    std::exception_ptr error;
    std::mutex error_mu;
    const auto worker = [&](std::int64_t begin, std::int64_t end) {
      try {
        for (std::int64_t i = begin; i < end; ++i) {
          gr.records[static_cast<std::size_t>(i)] = run_trial(cfg, gr.param, net, pi, i);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    };

    if (cfg.threads == 1) {
      worker(0, cfg.trials);
    } else {
      std::vector<std::thread> pool;
      const std::int64_t chunk = (cfg.trials + cfg.threads - 1) / cfg.threads;
      for (int w = 0; w < cfg.threads; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min<std::int64_t>(cfg.trials, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
      }
      for (std::thread& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    gr.summary = summarize(gr.records);
    result.grid_results.push_back(std::move(gr));
  }
  return result;
}

namespace {

std::string fmt_param(double param) {
  std::ostringstream os;
  os << param;
  return os.str();
}

}  // namespace

void write_experiment_csv(const ExperimentResult& result, const ExperimentConfig& cfg,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  std::ofstream summary(dir / "summary.csv");
  summary << "scenario,param,algo,trials,detect_rate,ci_lo,ci_hi,mean_dist,median_dist\n";

  for (const GridResult& gr : result.grid_results) {
    const std::string param = fmt_param(gr.param);

    std::ofstream trials(dir / ("trials_" + param + ".csv"));
    trials << "trial,q,p,t,source,infected_count,algo,estimate,distance,candidates,wall_ms\n";
    for (const TrialRecord& rec : gr.records) {
      for (const AlgoOutcome& out : rec.outcomes) {
        trials << rec.trial << ',' << rec.q << ',' << rec.p << ',' << rec.t << ','
               << rec.source << ',' << rec.infected_count << ',' << to_string(out.algo) << ','
               << out.estimate << ',' << out.distance << ',' << out.candidate_count << ','
               << out.wall_ms << '\n';
      }
    }

    for (const AlgoSummary& as : gr.summary.per_algo) {
      summary << to_string(cfg.scenario) << ',' << param << ',' << to_string(as.algo) << ','
              << as.trials << ',' << as.detect_rate << ',' << as.ci_lo << ',' << as.ci_hi << ','
              << as.mean_dist << ',' << as.median_dist << '\n';

      std::ofstream hist(dir / ("hist_" + param + "_" + to_string(as.algo) + ".csv"));
      hist << "hop,count,fraction\n";
      std::int64_t total = 0;
      for (std::int64_t c : as.hop_histogram) total += c;
      for (std::size_t hop = 0; hop < as.hop_histogram.size(); ++hop) {
        hist << hop << ',' << as.hop_histogram[hop] << ','
             << static_cast<double>(as.hop_histogram[hop]) / static_cast<double>(total) << '\n';
      }
    }
  }
}

}  // namespace sirloc
