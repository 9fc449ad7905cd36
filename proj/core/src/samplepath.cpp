#include "sirloc/samplepath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "sirloc/error.hpp"

namespace sirloc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k * log_base with the 0 * (-inf) = 0 convention, so x^0 == 1 survives x == 0.
double lpow(double log_base, std::int64_t k) {
  return k == 0 ? 0.0 : static_cast<double>(k) * log_base;
}

void check_snapshot(const Graph& g, const Snapshot& snap) {
  if (snap.flags.size() != g.node_count()) {
    fail(ErrorKind::domain, "snapshot size does not match graph");
  }
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
}

void check_root(const Graph& g, std::int32_t root) {
  if (root < 0 || static_cast<std::size_t>(root) >= g.node_count()) {
    fail(ErrorKind::domain, "root out of range");
  }
}

struct TreeOrder {
  std::vector<std::int32_t> order;  // BFS order, order[0] == root
  std::vector<std::int32_t> parent;
  std::vector<std::vector<std::int32_t>> children;
};

TreeOrder orient(const Graph& g, std::int32_t root) {
  TreeOrder t;
  t.parent.assign(g.node_count(), -1);
  t.children.resize(g.node_count());
  t.order.push_back(root);
  for (std::size_t head = 0; head < t.order.size(); ++head) {
    const std::int32_t u = t.order[head];
    for (std::int32_t v : g.neighbors(u)) {
      if (v == root || t.parent[static_cast<std::size_t>(v)] != -1) continue;
      t.parent[static_cast<std::size_t>(v)] = u;
      t.children[static_cast<std::size_t>(u)].push_back(v);
      t.order.push_back(v);
    }
  }
  return t;
}

// heal[u] == subtree of u contains no observed-infected node.
std::vector<char> subtree_clear(const TreeOrder& ord, const Snapshot& snap) {
  std::vector<char> heal(snap.flags.size(), 1);
  for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
    const auto u = static_cast<std::size_t>(*it);
    char h = snap.flags[u] == 0;
    for (std::int32_t c : ord.children[u]) h = h && heal[static_cast<std::size_t>(c)];
    heal[u] = h;
  }
  return heal;
}

// Max-probability DP. States per node u:
//   G[u][i] = best log-prob of u's subtree given u was infected at slot i.
//   F(u, a, e) = best log-prob of u's subtree given u's parent attacks it in
//                slots a+1 .. e (parent infected at a), maximizing over
//                "never infected" and every infection slot.
struct PathDp {
  const Graph& g;
  const Snapshot& snap;
  SirParams params;
  std::int32_t t_star;
  HealthyMode mode;
  TreeOrder ord;
  std::vector<char> heal;
  double lq, lp_surv, log_q, log_p;
  std::vector<std::vector<double>> G;
  std::vector<std::vector<std::int32_t>> Gr;  // argmax recovery slot, flag==0 rows

  PathDp(const Graph& graph, const Snapshot& s, std::int32_t root, const SirParams& pp,
         std::int32_t t, HealthyMode m)
      : g(graph), snap(s), params(pp), t_star(t), mode(m), ord(orient(graph, root)),
        heal(subtree_clear(ord, s)), lq(std::log1p(-pp.q)), lp_surv(std::log1p(-pp.p)),
        log_q(std::log(pp.q)), log_p(std::log(pp.p)), G(graph.node_count()),
        Gr(graph.node_count()) {}

  // Whole clear subtree, closed form: either every node stays susceptible or
  // u is infected on the first attack and recovers on the next slot (both
  // provably optimal inside a clear subtree).
  double clear_closed(std::int32_t u, std::int32_t a, std::int32_t e) const {
    const double never = lpow(lq, e - a);
    if (a + 1 > e || a + 2 > t_star) return never;
    double infect = log_q + log_p;
    for (std::int32_t c : ord.children[static_cast<std::size_t>(u)]) {
      infect += clear_closed(c, a + 1, a + 2);
    }
    return std::max(never, infect);
  }

  double F(std::int32_t u, std::int32_t a, std::int32_t e) const {
    const auto ui = static_cast<std::size_t>(u);
    if (mode == HealthyMode::closed_form && heal[ui]) return clear_closed(u, a, e);
    double best = heal[ui] ? lpow(lq, e - a) : kNegInf;
    for (std::int32_t i = a + 1; i <= e; ++i) {
      best = std::max(best, lpow(lq, i - a - 1) + log_q + G[ui][static_cast<std::size_t>(i)]);
    }
    return best;
  }

  void solve() {
    for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
      const std::int32_t u = *it;
      const auto ui = static_cast<std::size_t>(u);
      if (mode == HealthyMode::closed_form && heal[ui]) continue;
      G[ui].assign(static_cast<std::size_t>(t_star) + 1, kNegInf);
      Gr[ui].assign(static_cast<std::size_t>(t_star) + 1, -1);
      for (std::int32_t i = 0; i <= t_star; ++i) {
        if (snap.flags[ui]) {
          double v = lpow(lp_surv, t_star - i);
          for (std::int32_t c : ord.children[ui]) v += F(c, i, t_star);
          G[ui][static_cast<std::size_t>(i)] = v;
        } else {
          for (std::int32_t r = i + 1; r <= t_star; ++r) {
            double v = lpow(lp_surv, r - i - 1) + log_p;
            for (std::int32_t c : ord.children[ui]) v += F(c, i, r);
            if (v > G[ui][static_cast<std::size_t>(i)]) {
              G[ui][static_cast<std::size_t>(i)] = v;
              Gr[ui][static_cast<std::size_t>(i)] = r;
            }
          }
        }
      }
    }
  }

  void assign_clear(std::int32_t u, std::int32_t a, std::int32_t e, SirTrace& tr) const {
    const double never = lpow(lq, e - a);
    double infect = kNegInf;
    if (a + 1 <= e && a + 2 <= t_star) {
      infect = log_q + log_p;
      for (std::int32_t c : ord.children[static_cast<std::size_t>(u)]) {
        infect += clear_closed(c, a + 1, a + 2);
      }
    }
    if (infect <= never) return;  // whole subtree untouched
    tr.t_infect[static_cast<std::size_t>(u)] = a + 1;
    tr.t_recover[static_cast<std::size_t>(u)] = a + 2;
    for (std::int32_t c : ord.children[static_cast<std::size_t>(u)]) {
      assign_clear(c, a + 1, a + 2, tr);
    }
  }

  void assign(std::int32_t u, std::int32_t i, SirTrace& tr) const {
    const auto ui = static_cast<std::size_t>(u);
    tr.t_infect[ui] = i;
    std::int32_t e;
    if (snap.flags[ui]) {
      tr.t_recover[ui] = kNever;
      e = t_star;
    } else {
      const std::int32_t r = Gr[ui][static_cast<std::size_t>(i)];
      tr.t_recover[ui] = r;
      e = r;
    }
    for (std::int32_t c : ord.children[ui]) {
      const auto ci = static_cast<std::size_t>(c);
      if (mode == HealthyMode::closed_form && heal[ci]) {
        assign_clear(c, i, e, tr);
        continue;
      }
      double best = heal[ci] ? lpow(lq, e - i) : kNegInf;  // never-infected option
      std::int32_t best_i = -1;
      for (std::int32_t j = i + 1; j <= e; ++j) {
        const double v = lpow(lq, j - i - 1) + log_q + G[ci][static_cast<std::size_t>(j)];
        if (v > best) {
          best = v;
          best_i = j;
        }
      }
      if (best_i != -1) assign(c, best_i, tr);
    }
  }
};

}  // namespace

std::int32_t optimal_time(const Graph& tree, const Snapshot& snap, std::int32_t root) {
  if (!tree.is_tree()) fail(ErrorKind::not_a_tree, "sample-path scoring requires a tree");
  check_snapshot(tree, snap);
  check_root(tree, root);
  const std::vector<std::int32_t> dist = bfs_distances(tree, root);
  std::int32_t ecc = 0;
  for (std::int32_t i : snap.infected) ecc = std::max(ecc, dist[static_cast<std::size_t>(i)]);
  return ecc;
}

PathScore optimal_path_prob(const Graph& tree, const Snapshot& snap, std::int32_t root,
                            const SirParams& params, HealthyMode mode) {
  validate_params(params);
  const std::int32_t t_star = optimal_time(tree, snap, root);

  PathDp dp(tree, snap, root, params, t_star, mode);
  dp.solve();

  PathScore ps;
  ps.root = root;
  ps.t_star = t_star;
  ps.log_prob = dp.G[static_cast<std::size_t>(root)][0];
  ps.feasible = ps.log_prob > kNegInf;
  if (ps.feasible) {
    ps.witness.t_infect.assign(tree.node_count(), kNever);
    ps.witness.t_recover.assign(tree.node_count(), kNever);
    ps.witness.horizon = t_star;
    ps.witness.source = root;
    dp.assign(root, 0, ps.witness);
  }
  return ps;
}

PathScore brute_force_osp(const Graph& g, const Snapshot& snap, std::int32_t root,
                          const SirParams& params, std::int32_t t, std::size_t node_cap,
                          std::int32_t t_cap) {
  validate_params(params);
  check_snapshot(g, snap);
  check_root(g, root);
  if (t < 0) fail(ErrorKind::domain, "horizon must be non-negative");
  if (g.node_count() > node_cap) fail(ErrorKind::too_large, "brute force limited to tiny graphs");
  if (t > t_cap) fail(ErrorKind::too_large, "brute force limited to short horizons");

  const std::size_t n = g.node_count();
  // Enumerate (t_infect, t_recover) options compatible with each node's
  // observed flag; validity against the dynamics is checked per full trace.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> options(n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::int32_t lo = v == static_cast<std::size_t>(root) ? 0 : 1;
    const std::int32_t hi = v == static_cast<std::size_t>(root) ? 0 : t;
    if (snap.flags[v]) {
      for (std::int32_t i = lo; i <= hi; ++i) options[v].push_back({i, kNever});
    } else {
      if (v != static_cast<std::size_t>(root)) options[v].push_back({kNever, kNever});
      for (std::int32_t i = lo; i <= hi; ++i) {
        for (std::int32_t r = i + 1; r <= t; ++r) options[v].push_back({i, r});
      }
    }
    if (options[v].empty()) {
      PathScore ps;
      ps.root = root;
      ps.t_star = t;
      ps.log_prob = kNegInf;
      ps.feasible = false;
      return ps;
    }
  }

  SirTrace trace;
  trace.t_infect.assign(n, kNever);
  trace.t_recover.assign(n, kNever);
  trace.horizon = t;
  trace.source = root;

  PathScore best;
  best.root = root;
  best.t_star = t;
  best.log_prob = kNegInf;
  best.feasible = false;

  std::vector<std::size_t> idx(n, 0);
  std::size_t v = 0;
  while (true) {
    if (v == n) {
      if (trace_is_valid(g, trace)) {
        const double lp = trace_prob(g, trace, params).log_prob;
        if (!best.feasible || lp > best.log_prob) {
          best.feasible = true;
          best.log_prob = lp;
          best.witness = trace;
        }
      }
      --v;
      ++idx[v];
    }
    while (idx[v] == options[v].size()) {
      idx[v] = 0;
      if (v == 0) return best;
      --v;
      ++idx[v];
    }
    trace.t_infect[v] = options[v][idx[v]].first;
    trace.t_recover[v] = options[v][idx[v]].second;
    ++v;
  }
}

double tree_snapshot_likelihood(const Graph& tree, const Snapshot& snap, std::int32_t root,
                                const SirParams& params, std::int32_t t) {
  validate_params(params);
  if (!tree.is_tree()) fail(ErrorKind::not_a_tree, "tree likelihood requires a tree");
  if (snap.flags.size() != tree.node_count()) {
    fail(ErrorKind::domain, "snapshot size does not match graph");
  }
  check_root(tree, root);
  if (t < 0) fail(ErrorKind::domain, "horizon must be non-negative");

  const TreeOrder ord = orient(tree, root);
  const std::vector<char> heal = subtree_clear(ord, snap);
  const double q = params.q;
  const double p = params.p;

  // Sum-over-paths version of the max DP: SG[u][i] marginalizes u's subtree
  // given u infected at slot i; the child transition sums over "never" and
  // every infection slot inside the parent's attack window.
  std::vector<std::vector<double>> SG(tree.node_count());
  const auto sf = [&](std::int32_t c, std::int32_t a, std::int32_t e) {
    const auto ci = static_cast<std::size_t>(c);
    double s = heal[ci] ? std::pow(1.0 - q, e - a) : 0.0;
    for (std::int32_t i = a + 1; i <= e; ++i) {
      s += std::pow(1.0 - q, i - a - 1) * q * SG[ci][static_cast<std::size_t>(i)];
    }
    return s;
  };
  for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
    const std::int32_t u = *it;
    const auto ui = static_cast<std::size_t>(u);
    SG[ui].assign(static_cast<std::size_t>(t) + 1, 0.0);
    for (std::int32_t i = 0; i <= t; ++i) {
      if (snap.flags[ui]) {
        double v = std::pow(1.0 - p, t - i);
        for (std::int32_t c : ord.children[ui]) v *= sf(c, i, t);
        SG[ui][static_cast<std::size_t>(i)] = v;
      } else {
        double acc = 0.0;
        for (std::int32_t r = i + 1; r <= t; ++r) {
          double v = std::pow(1.0 - p, r - i - 1) * p;
          for (std::int32_t c : ord.children[ui]) v *= sf(c, i, r);
          acc += v;
        }
        SG[ui][static_cast<std::size_t>(i)] = acc;
      }
    }
  }
  return SG[static_cast<std::size_t>(root)][0];
}

namespace {

// Exact forward propagation of the full chain over ternary node states
// (0 = susceptible, 1 = infected, 2 = recovered). Returns the snapshot
// likelihood at every horizon in [0, t_max].
std::vector<double> forward_likelihoods(const Graph& g, std::int32_t source,
                                        const SirParams& params, const Snapshot& snap,
                                        std::int32_t t_max) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> pow3(n + 1, 1);
  for (std::size_t i = 1; i <= n; ++i) pow3[i] = pow3[i - 1] * 3;

  std::vector<double> dist(pow3[n], 0.0), next(pow3[n], 0.0);
  dist[pow3[static_cast<std::size_t>(source)]] = 1.0;  // source infected, rest susceptible

  std::vector<int> digit(n);
  const auto snapshot_mass = [&](const std::vector<double>& d) {
    double m = 0.0;
    for (std::size_t s = 0; s < d.size(); ++s) {
      if (d[s] == 0.0) continue;
      std::size_t code = s;
      bool ok = true;
      for (std::size_t v = 0; v < n; ++v) {
        const bool inf = code % 3 == 1;
        code /= 3;
        if (inf != (snap.flags[v] != 0)) {
          ok = false;
          break;
        }
      }
      if (ok) m += d[s];
    }
    return m;
  };

  std::vector<double> lik;
  lik.push_back(snapshot_mass(dist));
  for (std::int32_t step = 1; step <= t_max; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      std::size_t code = s;
      for (std::size_t v = 0; v < n; ++v) {
        digit[v] = static_cast<int>(code % 3);
        code /= 3;
      }
      // events: each infected node recovers w.p. p; each susceptible node
      // with k infected neighbors is infected w.p. 1 - (1-q)^k.
      struct Event {
        std::size_t node;
        bool infection;  // false => recovery
        double prob;
      };
      std::vector<Event> events;
      for (std::size_t v = 0; v < n; ++v) {
        if (digit[v] == 1) {
          events.push_back({v, false, params.p});
        } else if (digit[v] == 0) {
          int k = 0;
          for (std::int32_t nb : g.neighbors(static_cast<std::int32_t>(v))) {
            k += digit[static_cast<std::size_t>(nb)] == 1;
          }
          if (k > 0) events.push_back({v, true, 1.0 - std::pow(1.0 - params.q, k)});
        }
      }
      const std::size_t m = events.size();
      for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        double pr = dist[s];
        std::size_t code2 = s;
        for (std::size_t e = 0; e < m; ++e) {
          const bool hit = mask >> e & 1;
          pr *= hit ? events[e].prob : 1.0 - events[e].prob;
          if (hit) code2 += pow3[events[e].node];  // 0->1 or 1->2
        }
        if (pr > 0.0) next[code2] += pr;
      }
    }
    dist.swap(next);
    lik.push_back(snapshot_mass(dist));
  }
  return lik;
}

double combine(const std::vector<double>& lik, MleTimeRule rule) {
  if (rule == MleTimeRule::max_over_t) return *std::max_element(lik.begin(), lik.end());
  return std::accumulate(lik.begin(), lik.end(), 0.0);
}

}  // namespace

MleResult mle_estimator(const Graph& g, const Snapshot& snap, const SirParams& params,
                        std::int32_t t_max, std::mt19937_64& rng, const MleOptions& opts) {
  validate_params(params);
  check_snapshot(g, snap);
  if (t_max < 0) fail(ErrorKind::domain, "t_max must be non-negative");

  MleMethod method = opts.method;
  if (method == MleMethod::automatic) {
    method = g.is_tree() ? MleMethod::tree_dp : MleMethod::forward;
  }
  if (method == MleMethod::tree_dp && !g.is_tree()) {
    fail(ErrorKind::not_a_tree, "tree DP requires a tree");
  }
  if (method == MleMethod::forward && g.node_count() > opts.node_cap) {
    fail(ErrorKind::too_large, "forward propagation state space is 3^N");
  }

  MleResult res;
  res.scores.resize(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const auto src = static_cast<std::int32_t>(v);
    if (method == MleMethod::forward) {
      res.scores[v] = combine(forward_likelihoods(g, src, params, snap, t_max), opts.time_rule);
    } else {
      // A source at distance d from the farthest infected node needs at least
      // d slots to reach it, so every t < eccentricity contributes exactly 0.
      const auto ecc = infection_eccentricity(g, snap, src);
      if (!ecc || *ecc > t_max) {
        res.scores[v] = 0.0;
        continue;
      }
      std::vector<double> lik(static_cast<std::size_t>(t_max) + 1);
      for (std::int32_t t = *ecc; t <= t_max; ++t) {
        lik[static_cast<std::size_t>(t)] = tree_snapshot_likelihood(g, snap, src, params, t);
      }
      res.scores[v] = combine(lik, opts.time_rule);
    }
  }

  const double best = *std::max_element(res.scores.begin(), res.scores.end());
  std::vector<std::int32_t> argmax;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (res.scores[v] == best) argmax.push_back(static_cast<std::int32_t>(v));
  }
  if (argmax.size() == 1) {
    res.estimator = argmax[0];
  } else {
    std::uniform_int_distribution<std::size_t> d(0, argmax.size() - 1);
    res.estimator = argmax[d(rng)];
  }
  return res;
}

SamplePathResult sample_path_estimator(const Graph& tree, const Snapshot& snap,
                                       const SirParams& params, ScanMode mode,
                                       HealthyMode healthy) {
  validate_params(params);
  if (!tree.is_tree()) fail(ErrorKind::not_a_tree, "sample-path estimation requires a tree");
  check_snapshot(tree, snap);

  std::vector<std::int32_t> roots;
  if (mode == ScanMode::centers_only) {
    roots = jordan_infection_centers(tree, snap).centers;
  } else {
    roots.resize(tree.node_count());
    std::iota(roots.begin(), roots.end(), 0);
  }

  SamplePathResult res;
  for (std::int32_t r : roots) {
    const PathScore ps = optimal_path_prob(tree, snap, r, params, healthy);
    res.ranking.push_back({ps.root, ps.t_star, ps.log_prob});
  }
  std::stable_sort(res.ranking.begin(), res.ranking.end(),
                   [](const RankingEntry& a, const RankingEntry& b) {
                     return a.log_prob > b.log_prob;
                   });
  res.estimator = res.ranking.front().root;
  return res;
}

}  // namespace sirloc
