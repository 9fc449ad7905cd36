#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <vector>

#include "sirloc/graph.hpp"

namespace sirloc {

// Sentinel slot index for "has not happened". Serialized as -1 in CSV.
inline constexpr std::int32_t kNever = std::numeric_limits<std::int32_t>::max();

struct SirParams {
  double q = 0.5;  // per-neighbor per-slot infection probability, (0,1]
  double p = 0.0;  // per-slot recovery probability, [0,1]
};

void validate_params(const SirParams& params);

// Full sample path as per-node infection and recovery slots.
struct SirTrace {
  std::vector<std::int32_t> t_infect;
  std::vector<std::int32_t> t_recover;
  std::int32_t horizon = 0;
  std::int32_t source = 0;
};

// Discrete-time SIR. Slot semantics: at slot s in 1..horizon, every node with
// t_infect < s and t_recover >= s attacks each susceptible neighbor
// independently with probability q; recovery is then drawn with probability p
// for nodes infected before this slot. A node attacks in the slot it
// recovers; it never acts in the slot it was infected.
SirTrace simulate(const Graph& g, std::int32_t source, const SirParams& params,
                  std::int32_t horizon, std::mt19937_64& rng);

// flags[v] = 1 iff t_infect[v] <= horizon < t_recover[v].
Snapshot snapshot_of(const SirTrace& trace);

// Throws invalid-trace when the trace breaks the SirTrace invariants
// against g (source slot, ordering, causality, canonical horizon clamp).
void validate_trace(const Graph& g, const SirTrace& trace);
bool trace_is_valid(const Graph& g, const SirTrace& trace);

struct TraceProb {
  double log_prob;  // -inf for zero-probability traces
  double prob;
};

// Exact probability of the sample path under the slot semantics above.
TraceProb trace_prob(const Graph& g, const SirTrace& trace, const SirParams& params);

// CSV `node_id,t_infect,t_recover`; -1 encodes kNever.
void write_trace_csv(std::ostream& out, const SirTrace& trace);
SirTrace read_trace_csv(std::istream& in, std::int32_t horizon);

}  // namespace sirloc
