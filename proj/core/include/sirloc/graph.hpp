#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "sirloc/error.hpp"

namespace sirloc {

inline constexpr std::int32_t kUnreachable = -1;
inline constexpr std::size_t kDefaultNodeCap = 50'000'000;

// Immutable undirected simple graph over dense node indices 0..n-1.
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list; duplicate and reversed-duplicate edges collapse,
  // self-loops are dropped.
  static Graph from_edges(std::size_t node_count,
                          const std::vector<std::pair<std::int32_t, std::int32_t>>& edges);

  // Adopts prebuilt adjacency lists (sorted, symmetric, simple).
  static Graph from_adjacency(std::vector<std::vector<std::int32_t>> adj);

  std::size_t node_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const std::int32_t> neighbors(std::int32_t v) const {
    return {adj_[static_cast<std::size_t>(v)].data(), adj_[static_cast<std::size_t>(v)].size()};
  }
  std::int32_t degree(std::int32_t v) const {
    return static_cast<std::int32_t>(adj_[static_cast<std::size_t>(v)].size());
  }

  bool is_tree() const;  // connected with node_count-1 edges

 private:
  std::vector<std::vector<std::int32_t>> adj_;
  std::size_t edge_count_ = 0;
};

struct LoadedGraph {
  Graph graph;
  // dense index -> id as it appeared in the file (first-appearance order)
  std::vector<std::int64_t> original_ids;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_dropped = 0;
};

// SNAP-style edge list: two integer tokens per line, '#' comments.
LoadedGraph load_edge_list(std::istream& in);
LoadedGraph load_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

// Finite truncation of the (g+1)-regular tree: root (node 0) has
// child_degree+1 children, every internal node child_degree children,
// leaves at `depth`.
Graph gen_regular_tree(int child_degree, int depth, std::size_t node_cap = kDefaultNodeCap);

// Every node at depth < `depth` draws Binomial(trials, beta) children.
Graph gen_binomial_tree(int trials, double beta, int depth, std::mt19937_64& rng,
                        std::size_t node_cap = kDefaultNodeCap);

/// The observation Y: flags[v] != 0 means v is observed infected.
struct Snapshot {
  std::vector<std::uint8_t> flags;
  std::vector<std::int32_t> infected;  // sorted cache of flagged indices
};

Snapshot make_snapshot(std::vector<std::uint8_t> flags);
Snapshot read_snapshot_csv(std::istream& in, std::size_t node_count);
void write_snapshot_csv(std::ostream& out, const Snapshot& snap);

// Distance from src to every node; kUnreachable where no path exists.
std::vector<std::int32_t> bfs_distances(const Graph& g, std::int32_t src);

// Max distance from v to any infected node; nullopt when some infected node
// is unreachable from v. Throws no-infected on an empty infected set.
std::optional<std::int32_t> infection_eccentricity(const Graph& g, const Snapshot& snap,
                                                   std::int32_t v);

struct CenterSet {
  std::vector<std::int32_t> centers;  // sorted
  std::int32_t eccentricity = 0;
};

// All nodes attaining the minimum finite infection eccentricity.
CenterSet jordan_infection_centers(const Graph& g, const Snapshot& snap);

}  // namespace sirloc
