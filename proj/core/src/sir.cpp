#include "sirloc/sir.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace sirloc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k * log(base), with the 0 * -inf corner pinned to 0 (an empty product).
double lpow(double log_base, std::int64_t k) {
  if (k == 0) return 0.0;
  return static_cast<double>(k) * log_base;
}

bool attacks_at(const SirTrace& trace, std::int32_t u, std::int32_t s) {
  return trace.t_infect[static_cast<std::size_t>(u)] < s &&
         trace.t_recover[static_cast<std::size_t>(u)] >= s;
}

}  // namespace

void validate_params(const SirParams& params) {
  if (!(params.q > 0.0 && params.q <= 1.0)) fail(ErrorKind::config, "q must be in (0,1]");
  if (!(params.p >= 0.0 && params.p <= 1.0)) fail(ErrorKind::config, "p must be in [0,1]");
}

SirTrace simulate(const Graph& g, std::int32_t source, const SirParams& params,
                  std::int32_t horizon, std::mt19937_64& rng) {
  validate_params(params);
  if (source < 0 || static_cast<std::size_t>(source) >= g.node_count()) {
    fail(ErrorKind::config, "source out of range");
  }
  if (horizon < 0) fail(ErrorKind::config, "horizon must be >= 0");

  SirTrace trace;
  trace.t_infect.assign(g.node_count(), kNever);
  trace.t_recover.assign(g.node_count(), kNever);
  trace.horizon = horizon;
  trace.source = source;
  trace.t_infect[static_cast<std::size_t>(source)] = 0;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::int32_t> active{source};  // infected, not recovered
  std::vector<std::int32_t> newly;
  for (std::int32_t s = 1; s <= horizon; ++s) {
    newly.clear();
    for (std::int32_t u : active) {
      for (std::int32_t w : g.neighbors(u)) {
        if (trace.t_infect[static_cast<std::size_t>(w)] != kNever) continue;
        if (unif(rng) < params.q) {
          trace.t_infect[static_cast<std::size_t>(w)] = s;
          newly.push_back(w);
        }
      }
    }
    std::vector<std::int32_t> still;
    still.reserve(active.size() + newly.size());
    for (std::int32_t u : active) {
      if (unif(rng) < params.p) {
        trace.t_recover[static_cast<std::size_t>(u)] = s;
      } else {
        still.push_back(u);
      }
    }
    still.insert(still.end(), newly.begin(), newly.end());
    std::sort(still.begin(), still.end());
    active = std::move(still);
  }
  return trace;
}

Snapshot snapshot_of(const SirTrace& trace) {
  std::vector<std::uint8_t> flags(trace.t_infect.size(), 0);
  for (std::size_t v = 0; v < flags.size(); ++v) {
    flags[v] = trace.t_infect[v] <= trace.horizon && trace.t_recover[v] > trace.horizon;
  }
  return make_snapshot(std::move(flags));
}

bool trace_is_valid(const Graph& g, const SirTrace& trace) {
  const std::size_t n = g.node_count();
  if (trace.t_infect.size() != n || trace.t_recover.size() != n) return false;
  if (trace.horizon < 0) return false;
  if (trace.source < 0 || static_cast<std::size_t>(trace.source) >= n) return false;
  if (trace.t_infect[static_cast<std::size_t>(trace.source)] != 0) return false;
  for (std::size_t v = 0; v < n; ++v) {
    const std::int32_t ti = trace.t_infect[v];
    const std::int32_t tr = trace.t_recover[v];
    if (ti != kNever) {
      if (ti < 0 || ti > trace.horizon) return false;
      if (ti == 0 && static_cast<std::int32_t>(v) != trace.source) return false;
    }
    if (tr != kNever) {
      if (ti == kNever) return false;
      if (tr < ti + 1 || tr > trace.horizon) return false;
    }
    // causality: an infection needs a live attacker in its slot
    if (ti != kNever && ti >= 1) {
      bool attacked = false;
      for (std::int32_t u : g.neighbors(static_cast<std::int32_t>(v))) {
        if (attacks_at(trace, u, ti)) {
          attacked = true;
          break;
        }
      }
      if (!attacked) return false;
    }
  }
  return true;
}

void validate_trace(const Graph& g, const SirTrace& trace) {
  if (!trace_is_valid(g, trace)) fail(ErrorKind::invalid_trace, "trace violates SIR invariants");
}

TraceProb trace_prob(const Graph& g, const SirTrace& trace, const SirParams& params) {
  validate_params(params);
  validate_trace(g, trace);

  const double log_q1 = std::log1p(-params.q);  // log(1-q); -inf at q=1
  const double log_p = params.p > 0.0 ? std::log(params.p) : kNegInf;
  const double log_p1 = std::log1p(-params.p);

  double lp = 0.0;
  const std::size_t n = g.node_count();
  for (std::size_t v = 0; v < n; ++v) {
    const std::int32_t ti = trace.t_infect[v];
    const std::int32_t tr = trace.t_recover[v];

    // attack survival / infection factors while v is susceptible
    const std::int32_t last_sus_slot = (ti == kNever) ? trace.horizon : ti;
    for (std::int32_t s = 1; s <= last_sus_slot; ++s) {
      std::int64_t attackers = 0;
      for (std::int32_t u : g.neighbors(static_cast<std::int32_t>(v))) {
        if (attacks_at(trace, u, s)) ++attackers;
      }
      if (s == ti) {
        // infected this slot: 1 - (1-q)^attackers; attackers >= 1 by validation
        const double surv = std::exp(lpow(log_q1, attackers));
        lp += std::log1p(-surv);
      } else {
        if (attackers > 0 && params.q == 1.0) return {kNegInf, 0.0};
        lp += lpow(log_q1, attackers);
      }
      if (lp == kNegInf) return {kNegInf, 0.0};
    }

    // recovery factors
    if (ti != kNever) {
      if (tr != kNever) {
        lp += lpow(log_p1, tr - ti - 1);
        lp += log_p;
      } else {
        if (params.p == 1.0 && trace.horizon > ti) return {kNegInf, 0.0};
        lp += lpow(log_p1, trace.horizon - ti);
      }
      if (lp == kNegInf) return {kNegInf, 0.0};
    }
  }
  return {lp, std::exp(lp)};
}

void write_trace_csv(std::ostream& out, const SirTrace& trace) {
  out << "node_id,t_infect,t_recover\n";
  for (std::size_t v = 0; v < trace.t_infect.size(); ++v) {
    const std::int32_t ti = trace.t_infect[v];
    const std::int32_t tr = trace.t_recover[v];
    out << v << ',' << (ti == kNever ? -1 : ti) << ',' << (tr == kNever ? -1 : tr) << '\n';
  }
}

SirTrace read_trace_csv(std::istream& in, std::int32_t horizon) {
  std::string line;
  if (!std::getline(in, line) || line.find("t_infect") == std::string::npos) {
    fail(ErrorKind::parse, "trace CSV missing 'node_id,t_infect,t_recover' header");
  }
  SirTrace trace;
  trace.horizon = horizon;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::int64_t id = 0;
    std::int64_t ti = 0, tr = 0;
    char c1 = 0, c2 = 0;
    if (!(ls >> id >> c1 >> ti >> c2 >> tr) || c1 != ',' || c2 != ',') {
      fail(ErrorKind::parse, "trace line " + std::to_string(line_no) + ": malformed row");
    }
    if (id != static_cast<std::int64_t>(trace.t_infect.size())) {
      fail(ErrorKind::parse, "trace line " + std::to_string(line_no) + ": ids must be dense");
    }
    trace.t_infect.push_back(ti < 0 ? kNever : static_cast<std::int32_t>(ti));
    trace.t_recover.push_back(tr < 0 ? kNever : static_cast<std::int32_t>(tr));
  }
  for (std::size_t v = 0; v < trace.t_infect.size(); ++v) {
    if (trace.t_infect[v] == 0) trace.source = static_cast<std::int32_t>(v);
  }
  return trace;
}

}  // namespace sirloc
