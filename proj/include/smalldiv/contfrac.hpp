#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smalldiv/numeric.hpp"

namespace smalldiv {

enum class RuleKind { all_ones, omega_star, exp_liouville };

struct QuotientRule {
  RuleKind kind = RuleKind::all_ones;
  BigInt a1 = 1;
  // omega-star: alpha_n = alpha_scale / n^alpha_exponent
  double alpha_scale = 1.0;
  double alpha_exponent = 1.0;
  // exp-liouville: a_{n+1} = ceil(exp(c q_n) / q_n)
  double c = 0.5;
};

struct FrequencySpec {
  enum class Kind { literal, periodic, rule };

  Kind kind = Kind::rule;
  std::vector<BigInt> quotients;
  std::vector<BigInt> preperiod;
  std::vector<BigInt> period;
  QuotientRule rule;
  std::size_t depth_cap = std::size_t{1} << 16;
  std::size_t bit_cap = 1'000'000;

  static FrequencySpec golden();
  static FrequencySpec literal(std::vector<BigInt> quotients);
  static FrequencySpec periodic(std::vector<BigInt> preperiod, std::vector<BigInt> period);
  static FrequencySpec omega_star(BigInt a1 = 2, double alpha_scale = 1.0,
                                  double alpha_exponent = 1.0);
  static FrequencySpec exp_liouville(double c, BigInt a1 = 1);

  // Canonical mini-language form, parseable back.
  std::string describe() const;
};

enum class Truncation { none, depth_cap, bit_cap, literal_end };

class ContinuedFraction {
 public:
  std::size_t depth() const { return a_.size() - 1; }

  // n >= 1
  const BigInt& a(std::size_t n) const { return at(a_, n, 1); }
  const BigInt& M(std::size_t n) const { return at(M_, n, 1); }
  const BigInt& Mprime(std::size_t n) const { return at(Mp_, n, 1); }
  const BigInt& astar(std::size_t n) const { return at(astar_, n, 1); }
  // n >= 0
  const BigInt& p(std::size_t n) const { return at(p_, n, 0); }
  const BigInt& q(std::size_t n) const { return at(q_, n, 0); }

  bool truncated() const { return truncation_ != Truncation::none; }
  Truncation truncation() const { return truncation_; }
  // log a_{depth+1}, known only when a rule stopped on the bit cap.
  const std::optional<Interval>& next_log_quotient() const { return next_log_quotient_; }
  const FrequencySpec& spec() const { return spec_; }

 private:
  friend ContinuedFraction expand(const FrequencySpec&, std::size_t);

  const BigInt& at(const std::vector<BigInt>& v, std::size_t n, std::size_t lo) const;

  FrequencySpec spec_;
  std::vector<BigInt> a_{BigInt(0)};
  std::vector<BigInt> p_{BigInt(0)};
  std::vector<BigInt> q_{BigInt(1)};
  std::vector<BigInt> M_{BigInt(1)};
  std::vector<BigInt> Mp_{BigInt(1)};
  std::vector<BigInt> astar_{BigInt(0)};
  Truncation truncation_ = Truncation::none;
  std::optional<Interval> next_log_quotient_;
};

ContinuedFraction expand(const FrequencySpec& spec, std::size_t depth);

// Largest integer strictly below sqrt((a+2)/2).
BigInt legendre_astar(const BigInt& a_next);

struct RationalInterval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo < x && x < hi; }
  bool strictly_inside(const RationalInterval& outer) const {
    return outer.lo < lo && hi < outer.hi;
  }
};

// Open interval between the m-th and (m+1)-th convergents.
RationalInterval sandwich(const ContinuedFraction& cf, std::size_t m);

// Sign of q*omega - p - t. Deepens until the sandwich decides.
int compare_linear(const ContinuedFraction& cf, const BigInt& q, const BigInt& p,
                   const Rational& t);

// floor(q*omega) for q != 0.
BigInt floor_linear(const ContinuedFraction& cf, const BigInt& q);

// Nearest integer to q*omega.
BigInt nint_linear(const ContinuedFraction& cf, const BigInt& q);

struct DivisorEstimate {
  double value = 0.0;      // q*omega - p
  double rel_error = 0.0;  // bound on |error| / |value|
};

DivisorEstimate small_divisor(const ContinuedFraction& cf, const BigInt& q, const BigInt& p);

// Midpoint of the deepest sandwich, with its half-width.
Interval omega_interval(const ContinuedFraction& cf);
double omega_estimate(const ContinuedFraction& cf);

enum class NintVerdict { holds, fails, degenerate };

struct NintCheck {
  std::size_t k = 0;
  BigInt a;
  NintVerdict verdict = NintVerdict::holds;
};

// Checks |a q_k omega - a p_k| < 1/2 for 0 <= k <= k_max, 1 <= a <= a*_{k+1}.
// k = 0 with a_1 = 1 is reported as degenerate: q_0 = q_1 and nint(omega) = p_1.
std::vector<NintCheck> verify_nint_lemma(const ContinuedFraction& cf, std::size_t k_max);

}  // namespace smalldiv
