#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "smalldiv/contfrac.hpp"
#include "smalldiv/report.hpp"

namespace smalldiv {

using Complex = std::complex<double>;
using ModeIndex = std::pair<long, long>;  // (p, q)

// Coefficients of the basis e^{i(p x - q y)}, on which the operator acts by i(p - q omega).
class ModeMap {
 public:
  std::map<ModeIndex, Complex> entries;
  bool hermitian = false;

  void set(long p, long q, Complex c);
  // c at (p, q) and conj(c) at (-p, -q)
  void set_pair(long p, long q, Complex c);
  Complex get(long p, long q) const;
  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  // True when c_{-p,-q} = conj(c_{p,q}) holds exactly for every stored pair.
  bool symmetric() const;
};

ModeMap operator+(const ModeMap& a, const ModeMap& b);

struct SolvedModes {
  ModeMap g;
  std::map<ModeIndex, double> rel_error;
};

// g_{p,q} = a_{p,q} / (i (p - q omega))
SolvedModes solve_modes(const ModeMap& a, const ContinuedFraction& cf);

struct StripNormEstimate {
  double R = 0.0;
  double upper = 0.0;
  double sampled_lower = 0.0;
  int grid_n = 0;
};

// upper = sum |c| e^{R(|p|+|q|)}; sampled_lower = max |f| on a grid_n^2 grid of real
// parts, imaginary parts of both variables at +-R
StripNormEstimate strip_norm(const ModeMap& modes, double R, int grid_n = 64);

// max |c| e^{rho(|p|+|q|)}
double decay_constant(const ModeMap& modes, double rho);

BoundReport check_thm1(const ModeMap& a, const ContinuedFraction& cf, double rho, double delta,
                       double mu = 1.25, std::size_t depth = 60, int grid_n = 64);

struct RandomModeSpec {
  std::size_t modes = 50;
  long max_index = 8;
  double rho = 1.0;
  double A = 1.0;
  std::uint64_t seed = 1;
  bool hermitian = true;
};

// |c_{p,q}| <= A e^{-rho(|p|+|q|)}
ModeMap random_decaying_modes(const RandomModeSpec& spec);

struct AlphaReport {
  std::size_t n_max = 0;
  double alpha_bar_trunc = 0.0;  // sum_{n <= n_max} 1/q_n
  double tail = 0.0;             // bound on sum_{n > n_max} 1/q_n
  double alpha_bar_hi = 0.0;     // alpha_bar_trunc + tail
  double two_sum_alpha = 0.0;
  double lower = 0.0;            // 1 - tail / alpha_bar_trunc
  bool holds = false;            // lower <= two_sum_alpha <= 1, decided exactly
  bool tail_from_log = false;    // q_{n_max+1} known only through its logarithm
  double log_alpha_bar_hi = 0.0;
};

AlphaReport alpha_normalization(const ContinuedFraction& cf, std::size_t n_max);

struct Counterexample {
  ModeMap modes;
  AlphaReport alpha;
  double norm_upper = 0.0;  // strip_norm(modes, rho).upper
};

// eps e^{-rho(p_n+q_n)} alpha_n at +-(p_n, q_n), n = 1..n_max, alpha_n = 1 / (2 alpha_bar q_n)
Counterexample counterexample_modes(const ContinuedFraction& cf, double rho, double epsilon,
                                    std::size_t n_max);

struct WitnessEntry {
  std::size_t n = 0;
  BigInt p;
  BigInt q;
  double log_w_lo = 0.0;
  double log_w_hi = 0.0;
  double log_w_direct = 0.0;  // eps e^{-delta'(p+q)} alpha_n / |q omega - p| at the interval midpoint
  bool identity_ok = false;
};

// log of e^{(rho-delta')(p_n+q_n)} |g_{p_n,q_n}| for the counterexample datum, as intervals
std::vector<WitnessEntry> blowup_witness(const ContinuedFraction& cf, double rho, double delta_prime,
                                         double epsilon, std::size_t n_max);

struct DivergenceCheck {
  std::size_t n = 0;
  double log_lhs = 0.0;  // lower bound on log(e^{-q_n Delta} q_{n+1})
  double log_rhs = 0.0;  // log(1/q_n)
  bool holds = false;
};

// e^{-q_n Delta} q_{n+1} >= 1/q_n for 2 <= n <= available depth
std::vector<DivergenceCheck> divergence_diagnostic(const ContinuedFraction& cf, double Delta);

}  // namespace smalldiv
