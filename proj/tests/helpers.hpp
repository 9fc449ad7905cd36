#pragma once

// Shared fixtures and oracles for the test binaries: small-graph builders,
// random instance generators, an exhaustive trace enumerator, and an
// unlabeled-tree enumerator with canonical-form deduplication.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sirloc/graph.hpp"
#include "sirloc/sir.hpp"

namespace sirloc::testing {

inline Graph make_graph(std::size_t n,
                        std::vector<std::pair<std::int32_t, std::int32_t>> edges) {
  return Graph::from_edges(n, edges);
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
  return Graph::from_edges(n, edges);
}

// Node 0 is the hub.
inline Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::size_t i = 1; i <= leaves; ++i)
    edges.emplace_back(0, static_cast<std::int32_t>(i));
  return Graph::from_edges(leaves + 1, edges);
}

inline Snapshot snapshot_from(std::size_t n, const std::vector<std::int32_t>& infected) {
  std::vector<std::uint8_t> flags(n, 0);
  for (std::int32_t v : infected) flags[static_cast<std::size_t>(v)] = 1;
  return make_snapshot(std::move(flags));
}

// Uniform attachment: node j links to a uniform earlier node. Reaches every
// unlabeled tree shape with positive probability.
inline Graph random_tree(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::size_t j = 1; j < n; ++j) {
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(j) - 1);
    edges.emplace_back(pick(rng), static_cast<std::int32_t>(j));
  }
  return Graph::from_edges(n, edges);
}

// Random spanning tree plus `extra` random chords (duplicates collapse).
inline Graph random_connected_graph(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::size_t j = 1; j < n; ++j) {
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(j) - 1);
    edges.emplace_back(pick(rng), static_cast<std::int32_t>(j));
  }
  std::uniform_int_distribution<std::int32_t> any(0, static_cast<std::int32_t>(n) - 1);
  for (std::size_t k = 0; k < extra; ++k) {
    std::int32_t a = any(rng), b = any(rng);
    if (a != b) edges.emplace_back(a, b);
  }
  return Graph::from_edges(n, edges);
}

// Calls fn on every canonical trace with the given source and horizon that
// satisfies the trace invariants against g. Canonical means finite t_infect
// in [0, horizon], finite t_recover in [t_infect+1, horizon], kNever
// otherwise; by construction the set is exhaustive and mutually exclusive,
// so the probabilities of all enumerated traces sum to 1.
inline void enumerate_traces(const Graph& g, std::int32_t source, std::int32_t horizon,
                             const std::function<void(const SirTrace&)>& fn) {
  const std::size_t n = g.node_count();
  // Per-node state options as (t_infect, t_recover) pairs.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> options(n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::int32_t lo = (static_cast<std::int32_t>(v) == source) ? 0 : 1;
    const std::int32_t hi = (static_cast<std::int32_t>(v) == source) ? 0 : horizon;
    if (static_cast<std::int32_t>(v) != source) options[v].emplace_back(kNever, kNever);
    for (std::int32_t i = lo; i <= hi; ++i) {
      options[v].emplace_back(i, kNever);
      for (std::int32_t r = i + 1; r <= horizon; ++r) options[v].emplace_back(i, r);
    }
  }
  SirTrace trace;
  trace.t_infect.assign(n, kNever);
  trace.t_recover.assign(n, kNever);
  trace.horizon = horizon;
  trace.source = source;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    for (std::size_t v = 0; v < n; ++v) {
      trace.t_infect[v] = options[v][idx[v]].first;
      trace.t_recover[v] = options[v][idx[v]].second;
    }
    if (trace_is_valid(g, trace)) fn(trace);
    std::size_t v = 0;
    for (; v < n; ++v) {
      if (++idx[v] < options[v].size()) break;
      idx[v] = 0;
    }
    if (v == n) break;
  }
}

// Rooted-at-0 canonical form (sorted child subtree encodings); two trees on
// the same node count are isomorphic as rooted trees iff the strings match.
// For unrooted dedup we take the min over all roots.
inline std::string rooted_canonical(const Graph& g, std::int32_t root) {
  std::function<std::string(std::int32_t, std::int32_t)> enc =
      [&](std::int32_t v, std::int32_t parent) {
        std::vector<std::string> kids;
        for (std::int32_t w : g.neighbors(v))
          if (w != parent) kids.push_back(enc(w, v));
        std::sort(kids.begin(), kids.end());
        std::string s = "(";
        for (const auto& k : kids) s += k;
        s += ")";
        return s;
      };
  return enc(root, -1);
}

inline std::string tree_canonical(const Graph& g) {
  std::string best;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::string s = rooted_canonical(g, static_cast<std::int32_t>(v));
    if (best.empty() || s < best) best = s;
  }
  return best;
}

// All unlabeled trees with 1..max_n nodes, one representative per
// isomorphism class, via attach-to-earlier enumeration plus canonical-form
// dedup. (Counts per n: 1,1,1,2,3,6,11.)
inline std::vector<Graph> all_trees(std::size_t max_n) {
  std::vector<Graph> out;
  std::map<std::string, bool> seen;
  // parents[j] = parent of node j+1 (nodes attach in index order, so every
  // labeled tree on {0..n-1} with increasing DFS labels appears; this covers
  // all isomorphism classes).
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::vector<std::int32_t> parents(n > 0 ? n - 1 : 0, 0);
    while (true) {
      std::vector<std::pair<std::int32_t, std::int32_t>> edges;
      for (std::size_t j = 0; j + 1 < n; ++j)
        edges.emplace_back(parents[j], static_cast<std::int32_t>(j + 1));
      Graph g = Graph::from_edges(n, edges);
      std::string key = std::to_string(n) + ":" + tree_canonical(g);
      if (!seen.count(key)) {
        seen[key] = true;
        out.push_back(std::move(g));
      }
      std::size_t j = 0;
      for (; j + 1 < n; ++j) {
        if (++parents[j] <= static_cast<std::int32_t>(j)) break;
        parents[j] = 0;
      }
      if (n <= 1 || j + 1 >= n) break;
    }
  }
  return out;
}

// The seven-node worked example: source 0 infects 1 then 3 then 6; 2 and 5
// on the other branch; 4 stays susceptible; 0 and 2 recover by the horizon.
struct WorkedTrace {
  Graph g;
  SirTrace trace;
  std::vector<std::uint8_t> expected_flags{0, 1, 0, 1, 0, 1, 1};
  WorkedTrace() {
    g = make_graph(7, {{0, 1}, {0, 2}, {1, 3}, {2, 5}, {3, 6}, {0, 4}});
    trace.t_infect = {0, 1, 2, 2, kNever, 3, 3};
    trace.t_recover = {3, kNever, 3, kNever, kNever, kNever, kNever};
    trace.horizon = 3;
    trace.source = 0;
  }
};

}  // namespace sirloc::testing
