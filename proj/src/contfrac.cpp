#include "smalldiv/contfrac.hpp"

#include <mpfr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace smalldiv {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<BigInt>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i].get_str();
  }
  return out;
}

class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

// floor (or ceil) of exp(q * scale / n^exponent) / q, with precision escalation
// until the fractional part sits safely away from an integer.
BigInt exp_over_q(const BigInt& q, double scale, double exponent, std::size_t n, bool ceil_mode) {
  const long double x_est = to_long_double(q) * scale / std::pow(static_cast<long double>(n), exponent);
  const double bits = static_cast<double>(x_est / std::numbers::ln2_v<long double>);
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max(0.0, bits) + std::log2(bits + 2.0) + 128.0);
  for (int attempt = 0; attempt < 6; ++attempt, prec *= 2) {
    Mpfr x(prec), y(prec), qq(prec), t(prec), frac(prec);
    mpfr_set_z(qq.get(), q.get_mpz_t(), MPFR_RNDN);
    mpfr_set_d(t.get(), scale, MPFR_RNDN);
    mpfr_mul(x.get(), qq.get(), t.get(), MPFR_RNDN);
    if (exponent != 0.0) {
      Mpfr e(prec);
      mpfr_set_ui(t.get(), static_cast<unsigned long>(n), MPFR_RNDN);
      mpfr_set_d(e.get(), exponent, MPFR_RNDN);
      mpfr_pow(t.get(), t.get(), e.get(), MPFR_RNDN);
      mpfr_div(x.get(), x.get(), t.get(), MPFR_RNDN);
    }
    mpfr_exp(y.get(), x.get(), MPFR_RNDN);
    mpfr_div(y.get(), y.get(), qq.get(), MPFR_RNDN);
    mpfr_floor(t.get(), y.get());
    mpfr_sub(frac.get(), y.get(), t.get(), MPFR_RNDN);
    const double f = mpfr_get_d(frac.get(), MPFR_RNDN);
    if (f > 0x1p-40 && f < 1.0 - 0x1p-40) {
      BigInt r;
      mpfr_get_z(r.get_mpz_t(), t.get(), MPFR_RNDN);
      if (ceil_mode) r += 1;
      return r;
    }
  }
  throw Error("could not resolve the integer part of exp(...)/q");
}

struct RuleStep {
  std::optional<BigInt> a;
  std::optional<Interval> log_a;  // set when the quotient is known only in log space
};

RuleStep rule_quotient(const FrequencySpec& spec, std::size_t n, const BigInt& q_prev,
                       std::size_t q_prev_bits) {
  const QuotientRule& r = spec.rule;
  if (n == 1 || r.kind == RuleKind::all_ones) return {n == 1 ? r.a1 : BigInt(1), {}};

  const std::size_t idx = n - 1;  // a_{idx+1} from q_idx
  double x = 0.0;
  if (r.kind == RuleKind::omega_star)
    x = static_cast<double>(to_long_double(q_prev) * r.alpha_scale /
                            std::pow(static_cast<long double>(idx), r.alpha_exponent));
  else
    x = static_cast<double>(to_long_double(q_prev) * r.c);
  const double log_a = x - log_abs(q_prev);
  const double est_bits = static_cast<double>(q_prev_bits) + log_a / std::numbers::ln2 + 2.0;
  if (est_bits > static_cast<double>(spec.bit_cap) + 8.0) {
    const double pad = 1e-12 * (std::fabs(x) + 1.0);
    return {{}, Interval{log_a - pad, log_a + pad}};
  }
  if (r.kind == RuleKind::omega_star) {
    BigInt a = exp_over_q(q_prev, r.alpha_scale, r.alpha_exponent, idx, false) - 1;
    if (a < 1) a = 1;
    return {a, {}};
  }
  return {exp_over_q(q_prev, r.c, 0.0, idx, true), {}};
}

}  // namespace

FrequencySpec FrequencySpec::golden() {
  FrequencySpec s;
  s.kind = Kind::rule;
  s.rule.kind = RuleKind::all_ones;
  s.rule.a1 = 1;
  return s;
}

FrequencySpec FrequencySpec::literal(std::vector<BigInt> quotients) {
  FrequencySpec s;
  s.kind = Kind::literal;
  s.quotients = std::move(quotients);
  return s;
}

FrequencySpec FrequencySpec::periodic(std::vector<BigInt> preperiod, std::vector<BigInt> period) {
  FrequencySpec s;
  s.kind = Kind::periodic;
  s.preperiod = std::move(preperiod);
  s.period = std::move(period);
  return s;
}

FrequencySpec FrequencySpec::omega_star(BigInt a1, double alpha_scale, double alpha_exponent) {
  if (a1 < 1) throw DomainError("a1 must be >= 1");
  if (!(alpha_scale > 0.0) || !(alpha_exponent > 0.0) || alpha_exponent > 1.0)
    throw DomainError("omega-star needs alpha = s/n^e with s > 0 and 0 < e <= 1");
  FrequencySpec s;
  s.kind = Kind::rule;
  s.rule.kind = RuleKind::omega_star;
  s.rule.a1 = std::move(a1);
  s.rule.alpha_scale = alpha_scale;
  s.rule.alpha_exponent = alpha_exponent;
  return s;
}

FrequencySpec FrequencySpec::exp_liouville(double c, BigInt a1) {
  if (a1 < 1) throw DomainError("a1 must be >= 1");
  if (!(c > 0.0)) throw DomainError("exp-liouville needs c > 0");
  FrequencySpec s;
  s.kind = Kind::rule;
  s.rule.kind = RuleKind::exp_liouville;
  s.rule.a1 = std::move(a1);
  s.rule.c = c;
  return s;
}

std::string FrequencySpec::describe() const {
  switch (kind) {
    case Kind::literal:
      return "quotients:[" + join(quotients) + "]";
    case Kind::periodic:
      return "surd:[" + join(preperiod) + ";" + join(period) + "]";
    case Kind::rule:
      break;
  }
  switch (rule.kind) {
    case RuleKind::all_ones:
      return "golden";
    case RuleKind::omega_star: {
      std::string alpha = shortest(rule.alpha_scale) + "/n";
      if (rule.alpha_exponent != 1.0) alpha += "^" + shortest(rule.alpha_exponent);
      return "rule:omega-star(alpha=" + alpha + ",a1=" + rule.a1.get_str() + ")";
    }
    case RuleKind::exp_liouville:
      return "rule:exp-liouville(c=" + shortest(rule.c) + ",a1=" + rule.a1.get_str() + ")";
  }
  return {};
}

const BigInt& ContinuedFraction::at(const std::vector<BigInt>& v, std::size_t n,
                                    std::size_t lo) const {
  if (n < lo || n >= v.size()) {
    std::ostringstream os;
    os << "index " << n << " outside the expanded range [" << lo << ", " << v.size() - 1
       << "]; expand deeper";
    throw DepthExhausted(os.str());
  }
  return v[n];
}

ContinuedFraction expand(const FrequencySpec& spec, std::size_t depth) {
  if (depth < 1) throw DomainError("expand: depth must be >= 1");
  if (spec.kind == FrequencySpec::Kind::periodic && spec.period.empty())
    throw DomainError("periodic spec needs a nonempty period");
  ContinuedFraction cf;
  cf.spec_ = spec;
  cf.a_.reserve(depth + 1);
  cf.q_.reserve(depth + 1);
  cf.p_.reserve(depth + 1);

  for (std::size_t n = 1; n <= depth; ++n) {
    if (n > spec.depth_cap) {
      cf.truncation_ = Truncation::depth_cap;
      break;
    }
    BigInt a;
    switch (spec.kind) {
      case FrequencySpec::Kind::literal:
        if (n > spec.quotients.size()) {
          cf.truncation_ = Truncation::literal_end;
          break;
        }
        a = spec.quotients[n - 1];
        break;
      case FrequencySpec::Kind::periodic:
        a = n <= spec.preperiod.size()
                ? spec.preperiod[n - 1]
                : spec.period[(n - 1 - spec.preperiod.size()) % spec.period.size()];
        break;
      case FrequencySpec::Kind::rule: {
        RuleStep step = rule_quotient(spec, n, cf.q_.back(), bit_length(cf.q_.back()));
        if (!step.a) {
          cf.truncation_ = Truncation::bit_cap;
          cf.next_log_quotient_ = step.log_a;
          break;
        }
        a = *step.a;
        break;
      }
    }
    if (cf.truncation_ != Truncation::none) break;
    if (a < 1) throw Error("internal: frequency rule produced a quotient < 1");

    const BigInt& q1 = cf.q_.back();
    const BigInt& q2 = n >= 2 ? cf.q_[n - 2] : BigInt(0);
    const BigInt& p1 = cf.p_.back();
    const BigInt& p2 = n >= 2 ? cf.p_[n - 2] : BigInt(1);
    BigInt qn = a * q1 + q2;
    if (bit_length(qn) > spec.bit_cap) {
      cf.truncation_ = Truncation::bit_cap;
      cf.next_log_quotient_ = Interval{log_abs(a), log_abs(a)};
      break;
    }
    BigInt pn = a * p1 + p2;
    cf.q_.push_back(std::move(qn));
    cf.p_.push_back(std::move(pn));
    cf.M_.push_back(cf.M_.back() * a);
    cf.Mp_.push_back(cf.Mp_.back() * (a + 1));
    cf.astar_.push_back(legendre_astar(a));
    cf.a_.push_back(std::move(a));
  }
  if (cf.depth() == 0) throw DomainError("expand: frequency produced no quotients");
  return cf;
}

BigInt legendre_astar(const BigInt& a_next) {
  if (a_next < 1) throw DomainError("legendre_astar: quotient must be >= 1");
  const BigInt target = a_next + 2;  // want max x with 2x^2 < a+2
  BigInt half = target / 2;
  BigInt x;
  mpz_sqrt(x.get_mpz_t(), half.get_mpz_t());
  while (x > 1 && 2 * x * x >= target) x -= 1;
  while (2 * (x + 1) * (x + 1) < target) x += 1;
  return x;
}

RationalInterval sandwich(const ContinuedFraction& cf, std::size_t m) {
  if (m + 1 > cf.depth()) {
    std::ostringstream os;
    os << "sandwich(" << m << ") needs depth " << m + 1 << ", have " << cf.depth()
       << "; expand deeper";
    throw DepthExhausted(os.str());
  }
  Rational a(cf.p(m), cf.q(m));
  Rational b(cf.p(m + 1), cf.q(m + 1));
  a.canonicalize();
  b.canonicalize();
  if (a < b) return {a, b};
  return {b, a};
}

namespace {

// First sandwich index worth trying for a form with coefficient q.
std::size_t start_index(const ContinuedFraction& cf, const BigInt& q) {
  const std::size_t want = 2 * bit_length(q) + 8;
  const std::size_t d = cf.depth();
  for (std::size_t m = 0; m + 1 <= d; ++m)
    if (bit_length(cf.q(m)) + bit_length(cf.q(m + 1)) >= want) return m;
  return d - 1;
}

}  // namespace

int compare_linear(const ContinuedFraction& cf, const BigInt& q, const BigInt& p,
                   const Rational& t) {
  if (q == 0) {
    Rational v = Rational(-p) - t;
    return sgn(v);
  }
  for (std::size_t m = start_index(cf, q); m + 1 <= cf.depth(); ++m) {
    const RationalInterval s = sandwich(cf, m);
    Rational x = q * s.lo - p - t;
    Rational y = q * s.hi - p - t;
    const int sx = sgn(x), sy = sgn(y);
    // omega is strictly inside, so one zero endpoint still decides the sign
    if (sx >= 0 && sy >= 0 && (sx > 0 || sy > 0)) return 1;
    if (sx <= 0 && sy <= 0 && (sx < 0 || sy < 0)) return -1;
  }
  throw DepthExhausted("comparison against omega unresolved at depth " +
                       std::to_string(cf.depth()) + "; expand deeper");
}

BigInt floor_linear(const ContinuedFraction& cf, const BigInt& q) {
  if (q == 0) return 0;
  for (std::size_t m = start_index(cf, q); m + 1 <= cf.depth(); ++m) {
    BigInt na = q * cf.p(m), nb = q * cf.p(m + 1);
    const BigInt& da = cf.q(m);
    const BigInt& db = cf.q(m + 1);
    // endpoints A = na/da, B = nb/db; omega*q lies strictly between them
    Rational A(na, da), B(nb, db);
    A.canonicalize();
    B.canonicalize();
    const Rational& lo = A < B ? A : B;
    const Rational& hi = A < B ? B : A;
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    if (hi <= Rational(f + 1)) return f;
  }
  throw DepthExhausted("floor(q*omega) unresolved at depth " + std::to_string(cf.depth()) +
                       "; expand deeper");
}

BigInt nint_linear(const ContinuedFraction& cf, const BigInt& q) {
  const BigInt f = floor_linear(cf, q);
  return compare_linear(cf, q, f, Rational(1, 2)) < 0 ? f : BigInt(f + 1);
}

DivisorEstimate small_divisor(const ContinuedFraction& cf, const BigInt& q, const BigInt& p) {
  if (q == 0) return {static_cast<double>(to_long_double(BigInt(-p))), 0.0};
  for (std::size_t m = start_index(cf, q); m + 1 <= cf.depth(); ++m) {
    const BigInt n = q * cf.p(m) - p * cf.q(m);
    if (n == 0) continue;
    // |q omega - p - n/q_m| < |q| / (q_m q_{m+1})
    const double rel = ratio_to_double(abs(q), abs(n) * cf.q(m + 1));
    if (rel > 0x1p-60 && m + 2 <= cf.depth()) continue;
    if (rel >= 0.5) break;
    return {ratio_to_double(n, cf.q(m)), rel + 2 * kUlp};
  }
  throw DepthExhausted("small divisor unresolved at depth " + std::to_string(cf.depth()) +
                       "; expand deeper");
}

Interval omega_interval(const ContinuedFraction& cf) {
  const RationalInterval s = sandwich(cf, cf.depth() - 1);
  const double lo = s.lo.get_d();
  const double hi = s.hi.get_d();
  return {std::nextafter(lo, -INFINITY), std::nextafter(hi, INFINITY)};
}

double omega_estimate(const ContinuedFraction& cf) {
  const RationalInterval s = sandwich(cf, cf.depth() - 1);
  Rational mid = (s.lo + s.hi) / 2;
  return mid.get_d();
}

std::vector<NintCheck> verify_nint_lemma(const ContinuedFraction& cf, std::size_t k_max) {
  if (cf.depth() < k_max + 1)
    throw DepthExhausted("verify_nint_lemma needs depth >= k_max + 1");
  std::vector<NintCheck> out;
  const Rational half(1, 2), mhalf(-1, 2);
  for (std::size_t k = 0; k <= k_max; ++k) {
    const BigInt& astar = cf.astar(k + 1);
    std::vector<BigInt> multipliers;
    // |a (q_k omega - p_k)| grows with a, so huge ranges are checked at both ends only
    if (astar <= 4096) {
      for (BigInt a = 1; a <= astar; ++a) multipliers.push_back(a);
    } else {
      multipliers = {BigInt(1), astar};
    }
    for (const BigInt& a : multipliers) {
      NintCheck c{k, a, NintVerdict::holds};
      if (k == 0 && cf.a(1) == 1) {
        c.verdict = NintVerdict::degenerate;
      } else {
        const BigInt q = a * cf.q(k), p = a * cf.p(k);
        const bool ok = compare_linear(cf, q, p, half) < 0 && compare_linear(cf, q, p, mhalf) > 0;
        c.verdict = ok ? NintVerdict::holds : NintVerdict::fails;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace smalldiv
