#include "sirloc/gw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sirloc/error.hpp"

namespace sirloc::gw {

namespace {

void check_gq(int g, double q) {
  if (g < 1) fail(ErrorKind::domain, "offspring count g must be positive");
  if (!(q > 0.0) || q > 1.0) fail(ErrorKind::domain, "q must be in (0,1]");
}

void check_p(double p) {
  if (p < 0.0 || p > 1.0) fail(ErrorKind::domain, "p must be in [0,1]");
}

// Binomial(g, pr) pmf over 0..g, numerically plain (g is small).
std::vector<double> binom_pmf(int g, double pr) {
  std::vector<double> out(static_cast<std::size_t>(g) + 1);
  double coeff = 1.0;
  for (int k = 0; k <= g; ++k) {
    out[static_cast<std::size_t>(k)] =
        coeff * std::pow(pr, k) * std::pow(1.0 - pr, g - k);
    coeff = coeff * (g - k) / (k + 1);
  }
  return out;
}

// Offspring distribution of a node that stays infectious exactly t slots:
// each of its g children is infected with probability 1 - (1-q)^t.
void add_slot_term(std::vector<double>& pmf, int g, double q, double weight, int t) {
  const double pr = 1.0 - std::pow(1.0 - q, t);
  const std::vector<double> b = binom_pmf(g, pr);
  for (int k = 0; k <= g; ++k) pmf[static_cast<std::size_t>(k)] += weight * b[static_cast<std::size_t>(k)];
}

}  // namespace

OffspringDist offspring_pmf_tau(int g, double q, double p, int tau) {
  check_gq(g, q);
  check_p(p);
  if (tau < 1) fail(ErrorKind::domain, "tau must be at least 1");

  OffspringDist d;
  d.pmf.assign(static_cast<std::size_t>(g) + 1, 0.0);
  d.g = g;
  d.q = q;
  d.p = p;
  d.tau = tau;
  for (int t = 1; t < tau; ++t) {
    add_slot_term(d.pmf, g, q, std::pow(1.0 - p, t - 1) * p, t);
  }
  // the horizon lumps every infectious duration >= tau together
  add_slot_term(d.pmf, g, q, std::pow(1.0 - p, tau - 1), tau);
  return d;
}

OffspringDist offspring_pmf_inf(int g, double q, double p, double tol) {
  check_gq(g, q);
  check_p(p);
  if (p <= 0.0) fail(ErrorKind::domain, "infinite-horizon process needs p > 0");

  OffspringDist d;
  d.pmf.assign(static_cast<std::size_t>(g) + 1, 0.0);
  d.g = g;
  d.q = q;
  d.p = p;
  d.tau = -1;
  double tail = 1.0;  // (1-p)^{t-1}, remaining geometric mass before slot t
  for (int t = 1; tail > tol; ++t) {
    add_slot_term(d.pmf, g, q, tail * p, t);
    tail *= 1.0 - p;
  }
  const double mass = std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
  for (double& x : d.pmf) x /= mass;
  return d;
}

double extinction_prob(int g, double q) {
  check_gq(g, q);
  if (g * q <= 1.0) return 1.0;
  double rho = 0.0;
  for (std::int64_t it = 0; it < 1'000'000; ++it) {
    const double next = std::pow(1.0 - q + q * rho, g);
    if (std::abs(next - rho) < 1e-12) return next;
    rho = next;
  }
  return rho;
}

std::int64_t n0_bound(double epsilon, double rho) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) fail(ErrorKind::domain, "epsilon must be in (0,1)");
  if (rho < 0.0 || rho >= 1.0) fail(ErrorKind::domain, "rho must be in [0,1)");
  const double a = 8.0 * std::log(1.0 / epsilon) / (1.0 - rho);
  const double b = 4.0 / (1.0 - rho);  // keeps (1-rho) n0 / 2 >= 2
  return static_cast<std::int64_t>(std::ceil(std::max(a, b)));
}

// Probability of infecting at least one child: per infectious duration t the
// chance no child is ever hit is (1-q)^{gt}.
double p_tau(int g, double q, double p, int tau) {
  check_gq(g, q);
  check_p(p);
  if (tau < 1) fail(ErrorKind::domain, "tau must be at least 1");
  double acc = 0.0;
  for (int t = 1; t < tau; ++t) {
    acc += std::pow(1.0 - p, t - 1) * p * (1.0 - std::pow(1.0 - q, static_cast<double>(g) * t));
  }
  acc += std::pow(1.0 - p, tau - 1) * (1.0 - std::pow(1.0 - q, static_cast<double>(g) * tau));
  return acc;
}

std::int64_t l_prime(double epsilon, double p_tau_val, std::int64_t n0) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) fail(ErrorKind::domain, "epsilon must be in (0,1)");
  if (!(p_tau_val > 0.0) || p_tau_val >= 1.0) fail(ErrorKind::domain, "p_tau must be in (0,1)");
  if (n0 < 1) fail(ErrorKind::domain, "n0 must be positive");
  const double miss = std::pow(1.0 - p_tau_val, static_cast<double>(n0));
  const double rounds = std::ceil(std::log(epsilon) / std::log1p(-miss));
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  if (!(rounds < static_cast<double>(kMax))) return kMax;
  return static_cast<std::int64_t>(rounds);
}

SurvivalEstimate survival_mc(int g, double q, std::int64_t trials, int horizon,
                             std::mt19937_64& rng, std::int64_t pop_cap) {
  check_gq(g, q);
  if (trials < 1) fail(ErrorKind::domain, "trials must be positive");
  if (horizon < 0) fail(ErrorKind::domain, "horizon must be non-negative");

  std::int64_t alive_count = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::int64_t pop = 1;
    for (int gen = 0; gen < horizon && pop > 0; ++gen) {
      if (pop > pop_cap) break;  // declared survived
      std::binomial_distribution<std::int64_t> offspring(pop * g, q);
      pop = offspring(rng);
    }
    alive_count += pop > 0;
  }
  const double est = static_cast<double>(alive_count) / static_cast<double>(trials);
  SurvivalEstimate out;
  out.estimate = est;
  out.std_error = std::sqrt(est * (1.0 - est) / static_cast<double>(trials));
  out.trials = trials;
  return out;
}

}  // namespace sirloc::gw
