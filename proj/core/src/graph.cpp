#include "sirloc/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace sirloc {

Graph Graph::from_edges(std::size_t node_count,
                        const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
  std::vector<std::vector<std::int32_t>> adj(node_count);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return from_adjacency(std::move(adj));
}

Graph Graph::from_adjacency(std::vector<std::vector<std::int32_t>> adj) {
  Graph g;
  std::size_t half_edges = 0;
  for (const auto& nbrs : adj) half_edges += nbrs.size();
  g.adj_ = std::move(adj);
  g.edge_count_ = half_edges / 2;
  return g;
}

bool Graph::is_tree() const {
  const std::size_t n = node_count();
  if (n == 0) return false;
  if (edge_count_ != n - 1) return false;
  std::vector<std::int32_t> dist = bfs_distances(*this, 0);
  return std::none_of(dist.begin(), dist.end(),
                      [](std::int32_t d) { return d == kUnreachable; });
}

LoadedGraph load_edge_list(std::istream& in) {
  LoadedGraph out;
  std::unordered_map<std::int64_t, std::int32_t> id_map;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;

  auto intern = [&](std::int64_t id) {
    auto [it, inserted] = id_map.emplace(id, static_cast<std::int32_t>(out.original_ids.size()));
    if (inserted) out.original_ids.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::istringstream ls(line);
    std::int64_t a = 0, b = 0;
    if (!(ls >> a >> b)) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected two integer tokens");
    }
    std::string rest;
    if (ls >> rest) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": trailing token '" + rest + "'");
    }
    if (a < 0 || b < 0) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": negative node id");
    }
    if (a == b) {
      ++out.self_loops_dropped;
      intern(a);
      continue;
    }
    // Sequence the interning explicitly: argument evaluation order is
    // unspecified and first-appearance id order is part of the contract.
    const std::int32_t ia = intern(a);
    const std::int32_t ib = intern(b);
    edges.emplace_back(ia, ib);
  }
  if (out.original_ids.empty()) fail(ErrorKind::empty_input, "edge list holds no nodes");

  std::vector<std::vector<std::int32_t>> adj(out.original_ids.size());
  for (auto [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::size_t half_before = 0;
  for (auto& nbrs : adj) {
    half_before += nbrs.size();
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  out.graph = Graph::from_adjacency(std::move(adj));
  out.duplicate_edges_dropped = half_before / 2 - out.graph.edge_count();
  return out;
}

LoadedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse, "cannot open edge list: " + path);
  return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  const std::int32_t n = static_cast<std::int32_t>(g.node_count());
  for (std::int32_t u = 0; u < n; ++u) {
    for (std::int32_t v : g.neighbors(u)) {
      if (u < v) out << u << ' ' << v << '\n';
    }
  }
}

Graph gen_regular_tree(int child_degree, int depth, std::size_t node_cap) {
  if (child_degree < 2) fail(ErrorKind::config, "child_degree must be >= 2");
  if (depth < 0) fail(ErrorKind::config, "depth must be >= 0");

  // node count: 1 + (g+1) (g^L - 1)/(g - 1), computed incrementally with a cap.
  std::size_t total = 1;
  std::size_t level = 0;
  for (int d = 1; d <= depth; ++d) {
    level = (d == 1) ? static_cast<std::size_t>(child_degree) + 1
                     : level * static_cast<std::size_t>(child_degree);
    if (level > node_cap || total > node_cap - level) {
      fail(ErrorKind::too_large, "regular tree exceeds node cap");
    }
    total += level;
  }

  std::vector<std::vector<std::int32_t>> adj(total);
  std::int32_t next = 1;
  std::deque<std::pair<std::int32_t, int>> frontier;  // (node, depth)
  frontier.emplace_back(0, 0);
  while (!frontier.empty()) {
    auto [u, d] = frontier.front();
    frontier.pop_front();
    if (d == depth) continue;
    const int kids = (u == 0) ? child_degree + 1 : child_degree;
    for (int k = 0; k < kids; ++k) {
      std::int32_t c = next++;
      adj[static_cast<std::size_t>(u)].push_back(c);
      adj[static_cast<std::size_t>(c)].push_back(u);
      frontier.emplace_back(c, d + 1);
    }
  }
  return Graph::from_adjacency(std::move(adj));
}

Graph gen_binomial_tree(int trials, double beta, int depth, std::mt19937_64& rng,
                        std::size_t node_cap) {
  if (trials < 0) fail(ErrorKind::config, "trials must be >= 0");
  if (beta < 0.0 || beta > 1.0) fail(ErrorKind::config, "beta must be in [0,1]");
  if (depth < 0) fail(ErrorKind::config, "depth must be >= 0");

  std::vector<std::vector<std::int32_t>> adj(1);
  std::deque<std::pair<std::int32_t, int>> frontier;
  frontier.emplace_back(0, 0);
  std::binomial_distribution<int> kids_dist(trials, beta);
  while (!frontier.empty()) {
    auto [u, d] = frontier.front();
    frontier.pop_front();
    if (d == depth) continue;
    const int kids = (trials == 0 || beta == 0.0) ? 0 : kids_dist(rng);
    for (int k = 0; k < kids; ++k) {
      if (adj.size() >= node_cap) fail(ErrorKind::too_large, "binomial tree exceeds node cap");
      std::int32_t c = static_cast<std::int32_t>(adj.size());
      adj.emplace_back();
      adj[static_cast<std::size_t>(u)].push_back(c);
      adj[static_cast<std::size_t>(c)].push_back(u);
      frontier.emplace_back(c, d + 1);
    }
  }
  return Graph::from_adjacency(std::move(adj));
}

Snapshot make_snapshot(std::vector<std::uint8_t> flags) {
  Snapshot snap;
  snap.flags = std::move(flags);
  for (std::size_t v = 0; v < snap.flags.size(); ++v) {
    if (snap.flags[v]) snap.infected.push_back(static_cast<std::int32_t>(v));
  }
  return snap;
}

Snapshot read_snapshot_csv(std::istream& in, std::size_t node_count) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::parse, "empty snapshot file");
  if (line.find("node_id") == std::string::npos) {
    fail(ErrorKind::parse, "snapshot CSV missing 'node_id,infected' header");
  }
  std::vector<std::uint8_t> flags(node_count, 0);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::int64_t id = 0;
    int flag = 0;
    char comma = 0;
    std::istringstream ls(line);
    if (!(ls >> id >> comma >> flag) || comma != ',' || (flag != 0 && flag != 1)) {
      fail(ErrorKind::parse, "snapshot line " + std::to_string(line_no) + ": malformed row");
    }
    if (id < 0 || static_cast<std::size_t>(id) >= node_count) {
      fail(ErrorKind::parse, "snapshot line " + std::to_string(line_no) + ": node id out of range");
    }
    flags[static_cast<std::size_t>(id)] = static_cast<std::uint8_t>(flag);
  }
  return make_snapshot(std::move(flags));
}

void write_snapshot_csv(std::ostream& out, const Snapshot& snap) {
  out << "node_id,infected\n";
  for (std::size_t v = 0; v < snap.flags.size(); ++v) {
    out << v << ',' << (snap.flags[v] ? 1 : 0) << '\n';
  }
}

std::vector<std::int32_t> bfs_distances(const Graph& g, std::int32_t src) {
  std::vector<std::int32_t> dist(g.node_count(), kUnreachable);
  std::vector<std::int32_t> queue;
  queue.reserve(g.node_count());
  dist[static_cast<std::size_t>(src)] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::int32_t u = queue[head];
    std::int32_t du = dist[static_cast<std::size_t>(u)];
    for (std::int32_t v : g.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] == kUnreachable) {
        dist[static_cast<std::size_t>(v)] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<std::int32_t> infection_eccentricity(const Graph& g, const Snapshot& snap,
                                                   std::int32_t v) {
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
  std::vector<std::int32_t> dist = bfs_distances(g, v);
  std::int32_t ecc = 0;
  for (std::int32_t i : snap.infected) {
    std::int32_t d = dist[static_cast<std::size_t>(i)];
    if (d == kUnreachable) return std::nullopt;
    ecc = std::max(ecc, d);
  }
  return ecc;
}

CenterSet jordan_infection_centers(const Graph& g, const Snapshot& snap) {
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
  const std::size_t n = g.node_count();
  std::vector<std::int32_t> max_dist(n, 0);
  std::vector<std::int32_t> reached(n, 0);
  for (std::int32_t i : snap.infected) {
    std::vector<std::int32_t> dist = bfs_distances(g, i);
    for (std::size_t v = 0; v < n; ++v) {
      if (dist[v] == kUnreachable) continue;
      ++reached[v];
      max_dist[v] = std::max(max_dist[v], dist[v]);
    }
  }
  const std::int32_t need = static_cast<std::int32_t>(snap.infected.size());
  CenterSet out;
  out.eccentricity = std::numeric_limits<std::int32_t>::max();
  for (std::size_t v = 0; v < n; ++v) {
    if (reached[v] != need) continue;
    if (max_dist[v] < out.eccentricity) {
      out.eccentricity = max_dist[v];
      out.centers.clear();
    }
    if (max_dist[v] == out.eccentricity) out.centers.push_back(static_cast<std::int32_t>(v));
  }
  if (out.centers.empty()) {
    fail(ErrorKind::disconnected_evidence, "no node reaches every infected node");
  }
  return out;
}

}  // namespace sirloc
