#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smalldiv/classify.hpp"
#include "smalldiv/contfrac.hpp"
#include "smalldiv/report.hpp"

namespace smalldiv {

// q_{n+1} <= q_n^tau / C and a_{n+1} <= q_n^(tau-1) / C for every n.
struct DiophantineGrowth {
  double C = 1.0;
  double tau = 1.0;
};

// e^(beta n) <= q_n, q_{n+1} <= e^(beta'(n+1)), a_{n+1} <= e^(beta'(n+1) - beta n) past the expansion.
struct KLGrowth {
  double beta = 1.0;
  double beta_prime = 1.0;
};

using GrowthCertificate = std::variant<DiophantineGrowth, KLGrowth>;

std::string describe(const GrowthCertificate& cert);

// Growth bound implied by the frequency description itself (bounded quotients), if any.
std::optional<GrowthCertificate> rule_growth_certificate(const ContinuedFraction& cf);

struct RigorousTail {
  double bound = 0.0;
  std::string certificate;
};

struct HeuristicTail {
  double last_terms = 0.0;
};

struct BrjunoValue {
  double value = 0.0;
  std::size_t depth = 0;
  double last_term = 0.0;
  double rounding = 0.0;
  std::size_t dropped = 0;  // underflowed terms
  std::variant<RigorousTail, HeuristicTail> tail = HeuristicTail{};

  bool rigorous() const { return std::holds_alternative<RigorousTail>(tail); }
  double tail_bound() const;
  // value plus rigorous tail, or the bare value when no certificate exists
  double upper() const { return value + (rigorous() ? tail_bound() : 0.0) + rounding; }
};

BrjunoValue brj1(const ContinuedFraction& cf, double Delta, std::size_t depth,
                 const std::optional<GrowthCertificate>& cert = std::nullopt);
BrjunoValue brj2(const ContinuedFraction& cf, double Delta, std::size_t depth,
                 const std::optional<GrowthCertificate>& cert = std::nullopt);
// 2 brj1(Delta) + brj2(2 Delta)
BrjunoValue brj_combined(const ContinuedFraction& cf, double Delta, std::size_t depth,
                         const std::optional<GrowthCertificate>& cert = std::nullopt);

struct GammaDelta {
  double Gamma0 = 0.0;
  double brj_component = 0.0;
  double const_type_component = 0.0;
  double away_component = 0.0;
  double Delta = 0.0;
  Interval omega;
  BrjunoValue brj;
  double mu = 1.25;
  double G_const_type = 0.0;  // 8/(1+omega)^2
  double G_away = 0.0;        // 4/(1+omega) + 2/(1-omega)
};

GammaDelta gamma_delta(const ContinuedFraction& cf, double rho, double delta, std::size_t depth,
                       double mu = 1.25);

// min(1/tau, tau/e)
double dioph_delta_threshold(double tau);

struct DiophBound {
  double rhs1 = 0.0;
  double rhs2 = 0.0;
  double lead1 = 0.0;  // constant in front of Delta^-tau P_1
  double lead2 = 0.0;  // constant in front of Delta^-tau P_2
  double G1_0 = 0.0;
  double G2_1 = 0.0;   // at tau = 1: coefficient of X in the degree-1 P_2
  double G2_0 = 0.0;
  bool degenerate = false;
};

DiophBound dioph_bound_rhs(double C, double tau, double Delta);

struct KLConstants {
  double G_KLB1 = 0.0;
  double G_KLB21 = 0.0;
  double G_KLB22 = 0.0;         // (T+ + T-) e^b' ((g/e)^g + Gamma'(g)/b^2), the form used in table1()
  double G_KLB22_stated = 0.0;  // same with Gamma(g) in place of Gamma'(g)
};

struct KLBound {
  KLConstants G;
  double rhs1 = 0.0;
  double rhs2 = 0.0;
};

KLConstants kl_constants(const KLParams& params);
// rhs2 uses G_KLB22_stated
KLBound kl_bound_rhs(const KLParams& params, double Delta);

struct FinDiff {
  double d1 = 0.0;
  double d2 = 0.0;
};

FinDiff brj_fin_diff(const ContinuedFraction& cf, std::size_t m, double Delta, const KLParams& params);

enum class MajorantKind { Dph1, Dph2, Sigma1, Sigma2 };

struct MajorantParams {
  const ContinuedFraction* cf = nullptr;  // Dph
  double tau = 1.0;                       // Dph
  double beta = 1.0;                      // Sigma
  double beta_prime = 1.0;                // Sigma
};

double eval_majorant_series(MajorantKind kind, const MajorantParams& params, double Delta,
                            std::size_t n_max);

// Closed-form lemma bounds for the majorant series.
double dph1_lemma_bound(double tau, double Delta);
double dph2_lemma_bound(double tau, double Delta);
double sigma1_bound(double beta, double beta_prime, double Delta);
double sigma2_bound(double beta, double beta_prime, double Delta);

struct IntegralMajorization {
  double series = 0.0;          // sum_{n=N}^{n_max} B_1(n)
  double x_peak = 0.0;          // beta^-1 log(gamma / Delta)
  double peak_value = 0.0;      // (gamma/e)^gamma Delta^-gamma
  double integral = 0.0;        // int_N^inf B_1
  double closed_bound = 0.0;    // beta^-1 Gamma(gamma) Delta^-gamma
  bool holds = false;           // series <= peak + integral
  bool holds_closed = false;    // series <= peak + closed_bound
};

IntegralMajorization integral_majorization(double beta, double beta_prime, double Delta,
                                           std::size_t N, std::size_t n_max);

// brj_which(Delta) with the certificate's rigorous tail against the Thm 2 right-hand side.
BoundReport dioph_chain_check(const ContinuedFraction& cf, const DiophantineGrowth& g, double Delta,
                              std::size_t depth, int which);
// brj_which(Delta) with a KL tail against rhs_which + BrjFinDiff_which(N, Delta).
BoundReport kl_chain_check(const ContinuedFraction& cf, const KLParams& params, double Delta,
                           std::size_t depth, int which);

struct Table1Entry {
  double T_minus = 0.0;
  double T_plus = 0.0;
  KLConstants G;
};

// The eleven (T_-, T_+) columns, in display order.
std::vector<Table1Entry> table1();
// 2 significant digits: 5.3e00, 6.2e-1, 0.0
std::string format_two_digits(double x);
std::string table1_csv();

}  // namespace smalldiv
