#include "smalldiv/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace smalldiv {

namespace {

// Bounds on sum_{k > K} of ln(k or k+1) * log2(1 + 1/(k(k+2))), from integral comparison.
// Returns {lower, upper}.
std::pair<double, double> gauss_tail(double K, bool shifted_log) {
  const double ln2 = std::numbers::ln2;
  const double lK = std::log(K);
  double upper = (lK + 1.0) / K;
  if (shifted_log) upper += 1.0 / (2.0 * K * K);  // ln(x+1) <= ln x + 1/x
  upper /= ln2;
  const double L = K + 1.0;
  const double lL = std::log(L);
  // ln(1+y) >= y - y^2/2, y >= 1/x^2 - 2/x^3, y^2 <= 1/x^4, ln(x+1) >= ln x
  const double lower = ((lL + 1.0) / L - (2.0 * lL + 1.0) / (2.0 * L * L) -
                        (3.0 * lL + 1.0) / (18.0 * L * L * L)) / ln2;
  return {lower, upper};
}

}  // namespace

KhintchineConstants khintchine_constants(double tolerance) {
  if (!(tolerance >= 1e-10)) throw DomainError("khintchine_constants: tolerance must be >= 1e-10");
  CompensatedSum k0, k1;
  std::size_t k = 0;
  std::size_t K = 1024;
  for (;;) {
    for (; k < K; ) {
      ++k;
      const double x = static_cast<double>(k);
      const double w = std::log1p(1.0 / (x * (x + 2.0))) / std::numbers::ln2;
      k0 += std::log(x) * w;
      k1 += std::log1p(x) * w;
    }
    auto [lo0, hi0] = gauss_tail(static_cast<double>(K), false);
    auto [lo1, hi1] = gauss_tail(static_cast<double>(K), true);
    const double half = 0.5 * std::max(hi0 - lo0, hi1 - lo1);
    if (half <= tolerance) {
      KhintchineConstants out;
      out.kappa = k0.value() + 0.5 * (lo0 + hi0);
      out.kappa_prime = k1.value() + 0.5 * (lo1 + hi1);
      out.tail_bound = half + 4.0 * kUlp;  // per-term rounding is relative, summation is compensated
      out.tolerance = tolerance;
      out.terms = K;
      return out;
    }
    K *= 2;
  }
}

const KhintchineConstants& universal_constants() {
  static const KhintchineConstants k = khintchine_constants(1e-10);
  return k;
}

void save_constants_cache(const std::string& path, const KhintchineConstants& k) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write constants cache: " + path);
  char buf[256];
  std::snprintf(buf, sizeof buf, "kappa=%.17g kappa_prime=%.17g tol=%.17g\n", k.kappa,
                k.kappa_prime, k.tolerance);
  os << buf;
}

std::optional<KhintchineConstants> load_constants_cache(const std::string& path, double tolerance) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string line;
  std::getline(is, line);
  KhintchineConstants k;
  if (std::sscanf(line.c_str(), "kappa=%lf kappa_prime=%lf tol=%lf", &k.kappa, &k.kappa_prime,
                  &k.tolerance) != 3)
    return std::nullopt;
  if (k.tolerance > tolerance) return std::nullopt;
  k.tail_bound = k.tolerance;
  return k;
}

double certified_from_recursive(double C_rec) {
  if (!(C_rec > 0.0)) throw DomainError("recursive constant must be positive");
  return C_rec / (2.0 + C_rec);
}

namespace {

// |q_n omega - p_n| as an exact interval, tightened by the convergent bounds.
std::pair<Rational, Rational> convergent_distance(const ContinuedFraction& cf, std::size_t n) {
  const RationalInterval s = sandwich(cf, cf.depth() - 1);
  Rational a = cf.q(n) * s.lo - cf.p(n);
  Rational b = cf.q(n) * s.hi - cf.p(n);
  a = abs(a);
  b = abs(b);
  Rational lo = std::min(a, b), hi = std::max(a, b);
  Rational lo2(1, cf.q(n + 1) + cf.q(n)), hi2(1, cf.q(n + 1));
  lo2.canonicalize();
  hi2.canonicalize();
  if (lo2 > lo) lo = lo2;
  if (hi2 < hi) hi = hi2;
  return {lo, hi};
}

bool integral_power(double tau) { return tau == std::floor(tau) && tau <= 64.0; }

std::optional<BigInt> max_quotient_bound(const FrequencySpec& spec) {
  if (spec.kind == FrequencySpec::Kind::periodic) {
    BigInt A = 1;
    for (const auto& a : spec.preperiod) A = std::max(A, a);
    for (const auto& a : spec.period) A = std::max(A, a);
    return A;
  }
  if (spec.kind == FrequencySpec::Kind::rule && spec.rule.kind == RuleKind::all_ones)
    return std::max(BigInt(1), spec.rule.a1);
  return std::nullopt;
}

}  // namespace

DiophantineCert diophantine_constant(const ContinuedFraction& cf, double tau, std::size_t depth) {
  if (!(tau >= 1.0)) throw DomainError("diophantine_constant: tau must be >= 1");
  if (depth < 1 || cf.depth() < depth + 1)
    throw DepthExhausted("diophantine_constant: expansion shorter than depth + 1");
  DiophantineCert cert;
  cert.tau = tau;
  cert.depth = depth;

  double best_lo = INFINITY, best_hi = INFINITY;
  for (std::size_t n = 0; n <= depth; ++n) {
    auto [lo, hi] = convergent_distance(cf, n);
    double vlo, vhi;
    if (integral_power(tau)) {
      BigInt pw;
      mpz_pow_ui(pw.get_mpz_t(), cf.q(n).get_mpz_t(), static_cast<unsigned long>(tau));
      vlo = std::nextafter(Rational(lo * pw).get_d(), 0.0);
      vhi = std::nextafter(Rational(hi * pw).get_d(), INFINITY);
    } else {
      const double pw = std::exp(tau * log_abs(cf.q(n)));
      const double slack = 8.0 * kUlp * (1.0 + tau * log_abs(cf.q(n)));
      vlo = lo.get_d() * pw * (1.0 - slack);
      vhi = hi.get_d() * pw * (1.0 + slack);
    }
    if (vhi < best_hi || (vhi == best_hi && vlo < best_lo)) {
      best_lo = vlo;
      best_hi = vhi;
      cert.argmin_n = n;
    }
  }
  cert.C_empirical = {best_lo, best_hi};

  double log_C = INFINITY;
  for (std::size_t n = 0; n < depth; ++n) {
    const double lq = log_abs(cf.q(n));
    const double c1 = tau * lq - log_abs(cf.q(n + 1));
    const double c2 = (tau - 1.0) * lq - log_abs(cf.a(n + 1));
    log_C = std::min({log_C, c1, c2});
  }
  double C_rec = std::exp(log_C);
  if (auto A = max_quotient_bound(cf.spec())) {
    // q_{n+1} < (A+1) q_n and a_{n+1} <= A for every n
    C_rec = std::min(C_rec, 1.0 / (A->get_d() + 1.0));
    cert.rule_level = true;
  }
  cert.C_recursive = C_rec;
  cert.C_certified = certified_from_recursive(C_rec);
  return cert;
}

BrjunoPartial brjuno_partial_sum(const ContinuedFraction& cf, std::size_t depth) {
  BrjunoPartial out;
  const std::size_t d = std::min(depth, cf.depth() - 1);
  CompensatedSum s;
  for (std::size_t n = 1; n <= d; ++n) {
    const double t = log_abs(cf.q(n + 1)) / to_long_double(cf.q(n));
    s += t;
    out.last_term = t;
  }
  out.value = s.value();
  out.depth = d;
  return out;
}

double T_minus_max() { return universal_constants().kappa - kLogPhi; }

KLParams KLParams::make(double T_minus, double T_plus, std::size_t N) {
  if (!(T_minus >= 0.0) || !(T_plus >= 0.0)) throw DomainError("KL tolerances must be >= 0");
  if (!(T_minus < T_minus_max()))
    throw DomainError("T_minus must be below kappa - log(phi)");
  if (N < 1) throw DomainError("N must be >= 1");
  const auto& k = universal_constants();
  KLParams p;
  p.T_minus = T_minus;
  p.T_plus = T_plus;
  p.N = N;
  p.beta = k.kappa - T_minus;
  p.beta_prime = k.kappa_prime + T_plus;
  p.gamma = p.beta_prime / p.beta;
  if (!(p.gamma > 1.0)) throw DomainError("gamma must exceed 1");
  return p;
}

KLParams KLParams::from_rates(double beta, double beta_prime) {
  if (!(beta > 0.0) || !(beta_prime >= beta))
    throw DomainError("need 0 < beta <= beta_prime");
  const auto& k = universal_constants();
  KLParams p;
  p.beta = beta;
  p.beta_prime = beta_prime;
  p.gamma = beta_prime / beta;
  p.T_minus = k.kappa - beta;
  p.T_plus = beta_prime - k.kappa_prime;
  return p;
}

KLVerdicts kl_membership(const ContinuedFraction& cf, const KLParams& params, std::size_t depth) {
  if (depth < params.N) throw DomainError("kl_membership: depth must be >= N");
  if (depth > cf.depth()) throw DepthExhausted("kl_membership: depth beyond expansion");
  KLVerdicts v;
  v.lower_KL = v.upper_KL_prime = true;
  for (std::size_t n = params.N; n <= depth; ++n) {
    const double nn = static_cast<double>(n);
    if (v.lower_KL && params.beta * nn > log_abs(cf.M(n))) {
      v.lower_KL = false;
      v.first_lower_failure = n;
    }
    if (v.upper_KL_prime && log_abs(cf.Mprime(n)) > params.beta_prime * nn) {
      v.upper_KL_prime = false;
      v.first_upper_failure = n;
    }
  }
  v.KLBrj = v.lower_KL && v.upper_KL_prime;
  return v;
}

LevyExample levy_example_bound() {
  LevyExample e;
  e.ell = std::numbers::pi * std::numbers::pi / (12.0 * std::numbers::ln2);
  e.G_example = std::exp(e.ell) * (std::exp(-1.0) + 1.0 / e.ell);
  return e;
}

}  // namespace smalldiv
