#include "sirloc/detect.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>

namespace sirloc {

namespace {

std::int32_t pick_uniform(const std::vector<std::int32_t>& items, std::mt19937_64& rng) {
  if (items.size() == 1) return items[0];
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

std::int32_t break_score_tie(const std::vector<std::int32_t>& candidates,
                             const std::vector<std::int64_t>& scores, std::mt19937_64& rng) {
  std::int64_t best = *std::min_element(scores.begin(), scores.end());
  std::vector<std::int32_t> tied;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (scores[k] == best) tied.push_back(candidates[k]);
  }
  return pick_uniform(tied, rng);
}

// Per-infected BFS accumulation shared by the non-tree paths.
struct DistanceSums {
  std::vector<std::int32_t> max_dist;
  std::vector<std::int64_t> sum_dist;
  std::vector<std::int32_t> reached;
};

DistanceSums accumulate_distances(const Graph& g, const Snapshot& snap) {
  DistanceSums acc;
  acc.max_dist.assign(g.node_count(), 0);
  acc.sum_dist.assign(g.node_count(), 0);
  acc.reached.assign(g.node_count(), 0);
  for (std::int32_t i : snap.infected) {
    std::vector<std::int32_t> dist = bfs_distances(g, i);
    for (std::size_t v = 0; v < dist.size(); ++v) {
      if (dist[v] == kUnreachable) continue;
      ++acc.reached[v];
      acc.sum_dist[v] += dist[v];
      acc.max_dist[v] = std::max(acc.max_dist[v], dist[v]);
    }
  }
  return acc;
}

}  // namespace

DetectionResult reverse_infection(const Graph& g, const Snapshot& snap, std::mt19937_64& rng,
                                  const RiOptions& opts) {
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
  const std::size_t n = g.node_count();
  const std::size_t n_ids = snap.infected.size();
  const std::size_t words = (n_ids + 63) / 64;

  std::vector<std::uint64_t> have(n * words, 0);
  std::vector<std::uint64_t> fresh(n * words, 0);  // ids first seen this round
  std::vector<std::uint64_t> incoming(n * words, 0);
  std::vector<std::int32_t> count(n, 0);
  std::vector<std::int64_t> time_sum(n, 0);
  std::vector<std::vector<std::int32_t>> arrivals;
  if (opts.record_arrivals) arrivals.assign(n, std::vector<std::int32_t>(n_ids, -1));

  for (std::size_t k = 0; k < n_ids; ++k) {
    const auto v = static_cast<std::size_t>(snap.infected[k]);
    have[v * words + k / 64] |= std::uint64_t{1} << (k % 64);
    fresh[v * words + k / 64] |= std::uint64_t{1} << (k % 64);
    count[v] = 1;  // a node's own id counts as received at t = 0
    if (opts.record_arrivals) arrivals[v][k] = 0;
  }

  DetectionResult res;
  std::int32_t round = 0;
  const auto full = static_cast<std::int32_t>(n_ids);
  while (true) {
    bool done = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (count[v] == full) {
        done = true;
        break;
      }
    }
    if (done) break;

    // send phase: every node holding ids first seen last round forwards them
    // to each neighbor as one bundled message.
    std::int64_t sent = 0;
    std::fill(incoming.begin(), incoming.end(), 0);
    bool any = false;
    for (std::size_t u = 0; u < n; ++u) {
      bool has_fresh = false;
      for (std::size_t w = 0; w < words; ++w) has_fresh |= fresh[u * words + w] != 0;
      if (!has_fresh) continue;
      sent += g.degree(static_cast<std::int32_t>(u));
      for (std::int32_t nb : g.neighbors(static_cast<std::int32_t>(u))) {
        const auto b = static_cast<std::size_t>(nb);
        for (std::size_t w = 0; w < words; ++w) {
          incoming[b * words + w] |= fresh[u * words + w];
        }
      }
      any = true;
    }
    if (!any) fail(ErrorKind::disconnected_evidence, "no node reaches every infected node");
    res.messages_per_round.push_back(sent);

    ++round;
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t w = 0; w < words; ++w) {
        const std::uint64_t added = incoming[v * words + w] & ~have[v * words + w];
        fresh[v * words + w] = added;
        if (added == 0) continue;
        have[v * words + w] |= added;
        const int cnt = std::popcount(added);
        count[v] += cnt;
        time_sum[v] += static_cast<std::int64_t>(round) * cnt;
        if (opts.record_arrivals) {
          std::uint64_t bits = added;
          while (bits) {
            const int b = std::countr_zero(bits);
            bits &= bits - 1;
            arrivals[v][w * 64 + static_cast<std::size_t>(b)] = round;
          }
        }
      }
    }
  }

  res.rounds = round;
  res.min_eccentricity = round;
  for (std::size_t v = 0; v < n; ++v) {
    if (count[v] == full) {
      res.candidates.push_back(static_cast<std::int32_t>(v));
      res.tie_scores.push_back(time_sum[v]);
      if (opts.record_arrivals) res.arrival_times.push_back(arrivals[v]);
    }
  }
  res.estimator = break_score_tie(res.candidates, res.tie_scores, rng);
  return res;
}

DetectionResult ri_estimate(const Graph& g, const Snapshot& snap, std::mt19937_64& rng) {
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
  DetectionResult res;

  if (g.is_tree()) {
    // Jordan infection centers of a tree are the middles of the diameter
    // path of the infected set (double BFS).
    std::vector<std::int32_t> dist0 = bfs_distances(g, snap.infected[0]);
    std::int32_t a = snap.infected[0];
    for (std::int32_t i : snap.infected) {
      if (dist0[static_cast<std::size_t>(i)] > dist0[static_cast<std::size_t>(a)]) a = i;
    }
    std::vector<std::int32_t> dist_a = bfs_distances(g, a);
    std::vector<std::int32_t> parent(g.node_count(), -1);
    {
      std::vector<std::int32_t> queue{a};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        std::int32_t u = queue[head];
        for (std::int32_t v : g.neighbors(u)) {
          if (v != a && parent[static_cast<std::size_t>(v)] == -1) {
            parent[static_cast<std::size_t>(v)] = u;
            queue.push_back(v);
          }
        }
      }
    }
    std::int32_t b = a;
    for (std::int32_t i : snap.infected) {
      if (dist_a[static_cast<std::size_t>(i)] > dist_a[static_cast<std::size_t>(b)]) b = i;
    }
    const std::int32_t diam = dist_a[static_cast<std::size_t>(b)];
    std::vector<std::int32_t> path;
    for (std::int32_t v = b; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
    std::reverse(path.begin(), path.end());  // a .. b, length diam+1

    res.min_eccentricity = (diam + 1) / 2;
    if (diam % 2 == 0) {
      res.candidates = {path[static_cast<std::size_t>(diam / 2)]};
    } else {
      res.candidates = {path[static_cast<std::size_t>(diam / 2)],
                        path[static_cast<std::size_t>(diam / 2 + 1)]};
      std::sort(res.candidates.begin(), res.candidates.end());
    }
    for (std::int32_t c : res.candidates) {
      std::vector<std::int32_t> dist = bfs_distances(g, c);
      std::int64_t sum = 0;
      for (std::int32_t i : snap.infected) sum += dist[static_cast<std::size_t>(i)];
      res.tie_scores.push_back(sum);
    }
  } else {
    DistanceSums acc = accumulate_distances(g, snap);
    const auto need = static_cast<std::int32_t>(snap.infected.size());
    std::int32_t best = std::numeric_limits<std::int32_t>::max();
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      if (acc.reached[v] == need) best = std::min(best, acc.max_dist[v]);
    }
    if (best == std::numeric_limits<std::int32_t>::max()) {
      fail(ErrorKind::disconnected_evidence, "no node reaches every infected node");
    }
    res.min_eccentricity = best;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      if (acc.reached[v] == need && acc.max_dist[v] == best) {
        res.candidates.push_back(static_cast<std::int32_t>(v));
        res.tie_scores.push_back(acc.sum_dist[v]);
      }
    }
  }

  res.rounds = res.min_eccentricity;
  res.estimator = break_score_tie(res.candidates, res.tie_scores, rng);
  return res;
}

std::int32_t closeness_estimator(const Graph& g, const Snapshot& snap, std::mt19937_64& rng) {
  if (snap.infected.empty()) fail(ErrorKind::no_infected, "snapshot has no infected nodes");
  DistanceSums acc = accumulate_distances(g, snap);
  const auto need = static_cast<std::int32_t>(snap.infected.size());
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int32_t> argmins;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (acc.reached[v] != need) continue;
    if (acc.sum_dist[v] < best) {
      best = acc.sum_dist[v];
      argmins.clear();
    }
    if (acc.sum_dist[v] == best) argmins.push_back(static_cast<std::int32_t>(v));
  }
  if (argmins.empty()) {
    fail(ErrorKind::disconnected_evidence, "no node reaches every infected node");
  }
  return pick_uniform(argmins, rng);
}

std::int32_t random_guess(const Graph& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int32_t> d(0, static_cast<std::int32_t>(g.node_count()) - 1);
  return d(rng);
}

}  // namespace sirloc
