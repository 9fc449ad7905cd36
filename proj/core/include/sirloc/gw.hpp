#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sirloc::gw {

struct OffspringDist {
  std::vector<double> pmf;  // indexed 0..g
  int g = 0;
  double q = 0.0;
  double p = 0.0;
  int tau = -1;  // -1 for the infinite-horizon process
};

// Offspring pmf of the truncated branching process B^tau:
//   Pr(k) = sum_{t=1}^{tau-1} (1-p)^{t-1} p C(g,k) (1-(1-q)^t)^k (1-q)^{t(g-k)}
//         + (1-p)^{tau-1}     C(g,k) (1-(1-q)^tau)^k (1-q)^{tau(g-k)}
OffspringDist offspring_pmf_tau(int g, double q, double p, int tau);

// Offspring pmf of B^infinity, geometric series truncated once the tail
// mass drops below tol, then renormalized. Throws domain error for p = 0.
OffspringDist offspring_pmf_inf(int g, double q, double p, double tol = 1e-12);

// Smallest nonnegative root of rho = (1-q+q rho)^g via monotone fixed-point
// iteration from 0; returns 1 when g q <= 1.
double extinction_prob(int g, double q);

// n0 >= 8 ln(1/eps) / (1-rho), with the proof's floor (1-rho) n0 / 2 >= 2.
std::int64_t n0_bound(double epsilon, double rho);

// Probability that a node infects at least one child while infectious for
// up to tau slots; equals 1 - offspring_pmf_tau(...)[0].
double p_tau(int g, double q, double p, int tau);

// ceil(ln eps / ln(1 - (1-p_tau)^n0)).
std::int64_t l_prime(double epsilon, double p_tau_val, std::int64_t n0);

struct SurvivalEstimate {
  double estimate;
  double std_error;
  std::int64_t trials;
};

// Monte Carlo fraction of Binomial(g,q)-offspring processes alive at
// `horizon`; a population above pop_cap is declared survived.
SurvivalEstimate survival_mc(int g, double q, std::int64_t trials, int horizon,
                             std::mt19937_64& rng, std::int64_t pop_cap = 1'000'000);

}  // namespace sirloc::gw
