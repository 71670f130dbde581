#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "smalldiv/contfrac.hpp"

namespace smalldiv {

struct KhintchineConstants {
  double kappa = 0.0;
  double kappa_prime = 0.0;
  double tail_bound = 0.0;  // bound on |error| of each constant
  double tolerance = 0.0;
  std::size_t terms = 0;
};

// Gauss-measure series for kappa = E[log a_1] and kappa' = E[log(a_1 + 1)].
KhintchineConstants khintchine_constants(double tolerance = 1e-10);

// Cached at tolerance 1e-10.
const KhintchineConstants& universal_constants();

// Text format: kappa=<d> kappa_prime=<d> tol=<d>
void save_constants_cache(const std::string& path, const KhintchineConstants& k);
std::optional<KhintchineConstants> load_constants_cache(const std::string& path, double tolerance);

struct DiophantineCert {
  double tau = 1.0;
  Interval C_empirical;        // min over n <= depth of q_n^tau |q_n omega - p_n|
  std::size_t argmin_n = 0;
  double C_recursive = 0.0;    // largest C with q_{n+1} <= q_n^tau / C, a_{n+1} <= q_n^(tau-1) / C
  double C_certified = 0.0;    // C_recursive / (2 + C_recursive)
  std::size_t depth = 0;
  bool rule_level = false;     // true when the growth bound holds for every n, not only the tested ones
  std::string label() const { return rule_level ? "certificate" : "diagnostic"; }
};

double certified_from_recursive(double C_rec);

DiophantineCert diophantine_constant(const ContinuedFraction& cf, double tau, std::size_t depth);

struct BrjunoPartial {
  double value = 0.0;
  double last_term = 0.0;
  std::size_t depth = 0;
};

// sum_{n=1}^{depth} log(q_{n+1}) / q_n; diagnostic only
BrjunoPartial brjuno_partial_sum(const ContinuedFraction& cf, std::size_t depth);

struct KLParams {
  double T_minus = 0.0;
  double T_plus = 0.0;
  std::size_t N = 1;
  double beta = 0.0;
  double beta_prime = 0.0;
  double gamma = 0.0;

  // Validates T_minus < kappa - log(phi) and gamma > 1.
  static KLParams make(double T_minus, double T_plus, std::size_t N = 1);
  // Explicit beta, beta' for the ideal-sequence and grid checks.
  static KLParams from_rates(double beta, double beta_prime);
};

double T_minus_max();

struct KLVerdicts {
  bool upper_KL_prime = false;
  bool lower_KL = false;
  bool KLBrj = false;
  std::size_t first_lower_failure = 0;  // 0 when none
  std::size_t first_upper_failure = 0;
};

KLVerdicts kl_membership(const ContinuedFraction& cf, const KLParams& params, std::size_t depth);

struct LevyExample {
  double ell = 0.0;
  double G_example = 0.0;
};

LevyExample levy_example_bound();

}  // namespace smalldiv
