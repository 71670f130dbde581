#include "smalldiv/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>

#include "smalldiv/special.hpp"

namespace smalldiv {

namespace {

constexpr double kDropLog = -746.0;

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Remainder of a sum whose successive ratios are nonincreasing, given the
// last term and current ratio r < 1.
double geometric_rest(double term, double r) { return r < 1.0 ? term * r / (1.0 - r) : INFINITY; }

// Tail of a Diophantine-certified brj series over n >= d+1. The q_n past the
// expansion are bounded below by Fibonacci-type growth from q_d, q_{d+1}.
double dioph_tail(const ContinuedFraction& cf, std::size_t d, double Delta,
                  const DiophantineGrowth& g, bool second) {
  const double tau = g.tau;
  const double logCinv = -std::log(g.C);
  auto weight = [&](long double t) {  // bound on log a_{n+1} at q_n = t
    return logCinv + (tau - 1.0) * std::log(static_cast<double>(t));
  };
  const double t_star = second ? std::max(2.0 * tau / Delta, 3.0) : tau / Delta;
  double log_sup = tau * std::log(tau / (std::numbers::e * Delta));
  if (second) {
    const double w = weight(t_star);
    if (w <= 0.0) return 0.0;
    log_sup += std::log(w);
  }
  auto log_h = [&](long double t) -> double {
    double v = tau * std::log(static_cast<double>(t)) - static_cast<double>(t * Delta);
    if (second) {
      const double w = weight(t);
      if (w <= 0.0) return -INFINITY;
      v += std::log(w);
    }
    return v;
  };

  CompensatedSum acc;
  // exact q_{d+1}
  long double L_prev = to_long_double(cf.q(d));
  long double L = to_long_double(cf.q(d + 1));
  acc += exp_or_zero(log_h(L));
  double prev_term = INFINITY;
  for (int j = 1; j < 100000; ++j) {
    const long double next = L + L_prev;
    L_prev = L;
    L = next;
    if (!std::isfinite(static_cast<double>(L))) break;
    const double term = L < t_star ? std::exp(log_sup) : exp_or_zero(log_h(L));
    acc += term;
    if (L >= t_star) {
      const double r = prev_term > 0.0 && std::isfinite(prev_term) ? term / prev_term : 1.0;
      if (term == 0.0) break;
      if (r < 0.5 && term <= 1e-20 * acc.value()) {
        acc += geometric_rest(term, r);
        break;
      }
      prev_term = term;
    }
  }
  return acc.value() / g.C;
}

// Tail over n >= d+1 under KL growth; the envelope is log-concave in n.
double kl_tail(std::size_t d, double Delta, const KLGrowth& g, bool second) {
  auto log_f = [&](double n) -> double {
    double v = g.beta_prime * (n + 1.0) - std::exp(g.beta * n) * Delta;
    if (second) {
      const double w = g.beta_prime * (n + 1.0) - g.beta * n;
      if (w <= 0.0) return -INFINITY;
      v += std::log(w);
    }
    return v;
  };
  CompensatedSum acc;
  double prev = -INFINITY;
  for (std::size_t n = d + 1; n < d + 200000; ++n) {
    const double lt = log_f(static_cast<double>(n));
    const double term = exp_or_zero(lt);
    acc += term;
    if (lt < prev) {  // past the peak
      const double r = std::exp(lt - prev);
      if (term == 0.0) break;
      if (r < 0.5 && term <= 1e-20 * acc.value()) {
        acc += geometric_rest(term, r);
        break;
      }
    }
    prev = lt;
  }
  return acc.value();
}

BrjunoValue brj_impl(const ContinuedFraction& cf, double Delta, std::size_t depth,
                     const std::optional<GrowthCertificate>& cert, bool second) {
  if (!(Delta > 0.0)) throw DomainError("brj: Delta must be positive");
  if (depth > 0 && cf.depth() < depth + 1)
    throw DepthExhausted("brj: expansion shorter than depth + 1; expand deeper");
  BrjunoValue out;
  out.depth = depth;
  CompensatedSum s;
  std::deque<double> recent;
  for (std::size_t n = 1; n <= depth; ++n) {
    double term = 0.0;
    double lt = log_abs(cf.q(n + 1)) - static_cast<double>(to_long_double(cf.q(n)) * Delta);
    bool zero = false;
    if (second) {
      const double la = log_abs(cf.a(n + 1));
      if (la == 0.0)
        zero = true;
      else
        lt += std::log(la);
    }
    if (!zero) {
      if (lt < kDropLog)
        ++out.dropped;
      else
        term = std::exp(lt);
    }
    s += term;
    out.last_term = term;
    if (term > 0.0) {
      recent.push_back(term);
      if (recent.size() > 3) recent.pop_front();
    }
  }
  out.value = s.value();
  out.rounding = 4.0 * static_cast<double>(depth) * kUlp * out.value;
  if (cert) {
    RigorousTail t;
    t.certificate = describe(*cert);
    if (const auto* dg = std::get_if<DiophantineGrowth>(&*cert))
      t.bound = dioph_tail(cf, depth, Delta, *dg, second);
    else
      t.bound = kl_tail(depth, Delta, std::get<KLGrowth>(*cert), second);
    out.tail = t;
  } else {
    double last = 0.0;
    for (double v : recent) last += v;
    out.tail = HeuristicTail{last};
  }
  return out;
}

}  // namespace

std::string describe(const GrowthCertificate& cert) {
  if (const auto* d = std::get_if<DiophantineGrowth>(&cert))
    return "diophantine(C=" + shortest(d->C) + ",tau=" + shortest(d->tau) + ")";
  const auto& k = std::get<KLGrowth>(cert);
  return "kl(beta=" + shortest(k.beta) + ",beta_prime=" + shortest(k.beta_prime) + ")";
}

std::optional<GrowthCertificate> rule_growth_certificate(const ContinuedFraction& cf) {
  const FrequencySpec& s = cf.spec();
  BigInt A;
  if (s.kind == FrequencySpec::Kind::periodic) {
    A = 1;
    for (const auto& a : s.preperiod) A = std::max(A, a);
    for (const auto& a : s.period) A = std::max(A, a);
  } else if (s.kind == FrequencySpec::Kind::rule && s.rule.kind == RuleKind::all_ones) {
    A = std::max(BigInt(1), s.rule.a1);
  } else {
    return std::nullopt;
  }
  return DiophantineGrowth{1.0 / (A.get_d() + 1.0), 1.0};
}

double BrjunoValue::tail_bound() const {
  if (const auto* r = std::get_if<RigorousTail>(&tail)) return r->bound;
  return std::get<HeuristicTail>(tail).last_terms;
}

BrjunoValue brj1(const ContinuedFraction& cf, double Delta, std::size_t depth,
                 const std::optional<GrowthCertificate>& cert) {
  return brj_impl(cf, Delta, depth, cert, false);
}

BrjunoValue brj2(const ContinuedFraction& cf, double Delta, std::size_t depth,
                 const std::optional<GrowthCertificate>& cert) {
  return brj_impl(cf, Delta, depth, cert, true);
}

BrjunoValue brj_combined(const ContinuedFraction& cf, double Delta, std::size_t depth,
                         const std::optional<GrowthCertificate>& cert) {
  const BrjunoValue a = brj1(cf, Delta, depth, cert);
  const BrjunoValue b = brj2(cf, 2.0 * Delta, depth, cert);
  BrjunoValue out;
  out.value = 2.0 * a.value + b.value;
  out.depth = depth;
  out.last_term = 2.0 * a.last_term + b.last_term;
  out.rounding = 2.0 * a.rounding + b.rounding + 2.0 * kUlp * out.value;
  out.dropped = a.dropped + b.dropped;
  if (a.rigorous() && b.rigorous())
    out.tail = RigorousTail{2.0 * a.tail_bound() + b.tail_bound(),
                            std::get<RigorousTail>(a.tail).certificate};
  else
    out.tail = HeuristicTail{2.0 * a.tail_bound() + b.tail_bound()};
  return out;
}

GammaDelta gamma_delta(const ContinuedFraction& cf, double rho, double delta, std::size_t depth,
                       double mu) {
  if (!(rho > 0.0)) throw DomainError("gamma_delta: rho must be positive");
  if (!(delta > 0.0 && delta < rho)) throw DomainError("gamma_delta: delta must lie in (0, rho)");
  if (!(delta < std::exp(-1.0))) throw DomainError("gamma_delta: need delta < 1/e so that log(1/delta) > 1");
  if (!(mu >= 1.0)) throw DomainError("gamma_delta: mu must be >= 1");
  GammaDelta g;
  g.mu = mu;
  g.omega = omega_interval(cf);
  // each term evaluated at the end of the omega interval that makes it largest
  g.Delta = (1.0 + g.omega.lo) * delta;
  g.brj = brj_combined(cf, g.Delta, depth, rule_growth_certificate(cf));
  g.brj_component = 2.0 * g.brj.upper();
  g.G_const_type = 8.0 / ((1.0 + g.omega.lo) * (1.0 + g.omega.lo));
  g.G_away = 4.0 / (1.0 + g.omega.lo) + 2.0 / (1.0 - g.omega.hi);
  g.const_type_component = g.G_const_type / (delta * delta);
  g.away_component = g.G_away / delta * std::log(1.0 / delta);
  g.Gamma0 = g.brj_component + g.const_type_component + g.away_component;
  return g;
}

double dioph_delta_threshold(double tau) { return std::min(1.0 / tau, tau / std::numbers::e); }

DiophBound dioph_bound_rhs(double C, double tau, double Delta) {
  if (!(C > 0.0 && C < 1.0)) throw DomainError("dioph_bound_rhs: need 0 < C < 1");
  if (!(tau >= 1.0)) throw DomainError("dioph_bound_rhs: need tau >= 1");
  const double thr = dioph_delta_threshold(tau);
  if (!(Delta > 0.0 && Delta <= thr))
    throw DomainError("dioph_bound_rhs: Delta must lie in (0, min(1/tau, tau/e)] = (0, " +
                      shortest(thr) + "]");
  const double e = std::numbers::e;
  const double X = std::log(1.0 / Delta);
  const double A = std::pow(tau / e, tau);
  const double Cinv = 1.0 / C;
  const double logCinv = std::log(Cinv);
  const double G = gamma_eul(tau);
  const double scale = std::pow(Delta, -tau);

  DiophBound b;
  b.G1_0 = std::log(3.0 * tau * kPhi) + G / (2.0 * A);
  b.lead1 = Cinv * A / kLogPhi;
  b.rhs1 = b.lead1 * scale * (X + b.G1_0);
  if (tau == 1.0) {
    b.degenerate = true;
    b.lead2 = Cinv * A / kLogPhi;
    b.G2_1 = C * logCinv;
    b.G2_0 = std::log(3.0 * kPhi) + e / 2.0;
    b.rhs2 = b.lead2 * scale * (b.G2_1 * X + b.G2_0);
  } else {
    const double r = C * logCinv / (tau - 1.0);
    b.G2_1 = r + 0.5 * G / A + std::log(3.0 * kPhi * (tau + 1.0) * (tau + 1.0));
    b.G2_0 = r * (std::log(3.0 * kPhi * tau) + G / (2.0 * A)) +
             std::log(3.0 * kPhi * (tau + 1.0)) * std::log(tau + 1.0) + gamma_eul_prime(tau) / A;
    b.lead2 = Cinv * (tau - 1.0) * A / kLogPhi;
    b.rhs2 = b.lead2 * scale * (X * X + b.G2_1 * X + b.G2_0);
  }
  return b;
}

KLConstants kl_constants(const KLParams& p) {
  const double e = std::numbers::e;
  const double g = p.gamma;
  const double Gg = gamma_eul(g);
  const double Gpg = gamma_eul_prime(g);
  const double pk = std::pow(g / e, g);
  const double eb = std::exp(p.beta_prime);
  const double T = p.T_plus + p.T_minus;
  KLConstants c;
  c.G_KLB1 = eb * (Gg / p.beta + pk);
  c.G_KLB22 = T * eb * (pk + Gpg / (p.beta * p.beta));
  c.G_KLB22_stated = T * eb * (pk + Gg / (p.beta * p.beta));
  c.G_KLB21 = eb * (T * (Gg / p.beta + pk) + pk * std::log(2.0 * g) + Gpg / p.beta);
  return c;
}

KLBound kl_bound_rhs(const KLParams& params, double Delta) {
  if (!(Delta > 0.0)) throw DomainError("kl_bound_rhs: Delta must be positive");
  KLBound b;
  b.G = kl_constants(params);
  const double s = std::pow(Delta, -params.gamma);
  b.rhs1 = b.G.G_KLB1 * s;
  b.rhs2 = (b.G.G_KLB21 + b.G.G_KLB22_stated * std::log(1.0 / Delta)) * s;
  return b;
}

FinDiff brj_fin_diff(const ContinuedFraction& cf, std::size_t m, double Delta, const KLParams& p) {
  if (m < 1) throw DomainError("brj_fin_diff: m must be >= 1");
  if (m > cf.depth()) throw DepthExhausted("brj_fin_diff: depth must be >= m");
  CompensatedSum a1, b1, a2, b2;
  for (std::size_t n = 1; n + 1 <= m; ++n) {
    const double nn = static_cast<double>(n);
    const double lt = log_abs(cf.q(n + 1)) - static_cast<double>(to_long_double(cf.q(n)) * Delta);
    const double t = exp_or_zero(lt);
    a1 += t;
    a2 += t * log_abs(cf.a(n + 1));
    const double ideal = exp_or_zero(p.beta_prime * (nn + 1.0) - std::exp(p.beta * nn) * Delta);
    b1 += ideal;
    b2 += ideal * (p.beta_prime * (nn + 1.0) - p.beta * nn);
  }
  return {a1.value() - b1.value(), a2.value() - b2.value()};
}

double eval_majorant_series(MajorantKind kind, const MajorantParams& mp, double Delta,
                            std::size_t n_max) {
  if (!(Delta > 0.0)) throw DomainError("eval_majorant_series: Delta must be positive");
  CompensatedSum s;
  if (kind == MajorantKind::Dph1 || kind == MajorantKind::Dph2) {
    if (!mp.cf) throw DomainError("eval_majorant_series: Dph needs a continued fraction");
    if (n_max > mp.cf->depth()) throw DepthExhausted("eval_majorant_series: n_max beyond expansion");
    for (std::size_t n = 1; n <= n_max; ++n) {
      const BigInt& q = mp.cf->q(n);
      const double lq = log_abs(q);
      double lt = mp.tau * lq - static_cast<double>(to_long_double(q) * Delta);
      if (kind == MajorantKind::Dph2) {
        if (lq == 0.0) continue;
        lt += std::log(lq);
      }
      s += exp_or_zero(lt);
    }
    return s.value();
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    double v = exp_or_zero(mp.beta_prime * nn - std::exp(mp.beta * nn) * Delta);
    if (kind == MajorantKind::Sigma2) v *= nn;
    s += v;
  }
  return s.value();
}

double dph1_lemma_bound(double tau, double Delta) {
  const double A = std::pow(tau / std::numbers::e, tau);
  const double G0 = std::log(3.0 * tau * kPhi) + gamma_eul(tau) / (2.0 * A);
  return A / kLogPhi * std::pow(Delta, -tau) * (std::log(1.0 / Delta) + G0);
}

double dph2_lemma_bound(double tau, double Delta) {
  if (!(Delta <= dioph_delta_threshold(tau)))
    throw DomainError("dph2_lemma_bound: Delta above min(1/tau, tau/e)");
  const double A = std::pow(tau / std::numbers::e, tau);
  const double X = std::log(1.0 / Delta);
  const double G1 = std::log(3.0 * kPhi * (tau + 1.0) * (tau + 1.0)) + gamma_eul(tau) / (2.0 * A);
  const double G0 = std::log(3.0 * kPhi * (tau + 1.0)) * std::log(tau + 1.0) + gamma_eul_prime(tau) / A;
  return A / kLogPhi * std::pow(Delta, -tau) * (X * X + G1 * X + G0);
}

double sigma1_bound(double beta, double beta_prime, double Delta) {
  const double g = beta_prime / beta;
  return (gamma_eul(g) / beta + std::pow(g / std::numbers::e, g)) * std::pow(Delta, -g);
}

double sigma2_bound(double beta, double beta_prime, double Delta) {
  const double g = beta_prime / beta;
  const double pk = std::pow(g / std::numbers::e, g);
  const double s = std::pow(Delta, -g);
  return (pk * std::log(2.0 * g) / beta + gamma_eul_prime(g) / (beta * beta)) * s +
         (pk + gamma_eul(g) / (beta * beta)) * s * std::log(1.0 / Delta);
}

IntegralMajorization integral_majorization(double beta, double beta_prime, double Delta,
                                           std::size_t N, std::size_t n_max) {
  if (!(beta > 0.0 && beta_prime > beta && Delta > 0.0))
    throw DomainError("integral_majorization: need 0 < beta < beta_prime and Delta > 0");
  IntegralMajorization r;
  const double g = beta_prime / beta;
  CompensatedSum s;
  for (std::size_t n = N; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    s += exp_or_zero(beta_prime * nn - std::exp(beta * nn) * Delta);
  }
  r.series = s.value();
  r.x_peak = std::log(g / Delta) / beta;
  r.peak_value = std::pow(g / std::numbers::e, g) * std::pow(Delta, -g);
  const double y0 = std::exp(beta * static_cast<double>(N)) * Delta;
  r.integral = std::pow(Delta, -g) / beta * upper_incomplete_gamma(g, y0);
  r.closed_bound = gamma_eul(g) / beta * std::pow(Delta, -g);
  r.holds = r.series <= r.peak_value + r.integral;
  r.holds_closed = r.series <= r.peak_value + r.closed_bound;
  return r;
}

BoundReport dioph_chain_check(const ContinuedFraction& cf, const DiophantineGrowth& g, double Delta,
                              std::size_t depth, int which) {
  if (which != 1 && which != 2) throw DomainError("dioph_chain_check: which must be 1 or 2");
  const DiophBound b = dioph_bound_rhs(g.C, g.tau, Delta);
  const BrjunoValue v = which == 1 ? brj1(cf, Delta, depth, g) : brj2(cf, Delta, depth, g);
  return BoundReport::make(which == 1 ? "brj1" : "brj2", v.upper(), which == 1 ? b.rhs1 : b.rhs2,
                           {{"Delta", Delta}, {"C", g.C}, {"tau", g.tau}, {"depth", static_cast<double>(depth)},
                            {"value", v.value}, {"tail", v.tail_bound()}});
}

BoundReport kl_chain_check(const ContinuedFraction& cf, const KLParams& params, double Delta,
                           std::size_t depth, int which) {
  if (which != 1 && which != 2) throw DomainError("kl_chain_check: which must be 1 or 2");
  const KLBound b = kl_bound_rhs(params, Delta);
  const FinDiff fd = brj_fin_diff(cf, params.N, Delta, params);
  const KLGrowth g{params.beta, params.beta_prime};
  const BrjunoValue v = which == 1 ? brj1(cf, Delta, depth, g) : brj2(cf, Delta, depth, g);
  const double rhs = which == 1 ? b.rhs1 + fd.d1 : b.rhs2 + fd.d2;
  return BoundReport::make(which == 1 ? "brj1" : "brj2", v.upper(), rhs,
                           {{"Delta", Delta}, {"T_minus", params.T_minus}, {"T_plus", params.T_plus},
                            {"N", static_cast<double>(params.N)}, {"depth", static_cast<double>(depth)},
                            {"value", v.value}, {"tail", v.tail_bound()},
                            {"fin_diff", which == 1 ? fd.d1 : fd.d2}});
}

std::vector<Table1Entry> table1() {
  static const double cols[11][2] = {{0.0, 0.0}, {0.1, 0.1}, {0.1, 0.5}, {0.1, 1.0},
                                     {0.1, 2.0}, {0.2, 0.5}, {0.2, 1.0}, {0.2, 2.0},
                                     {0.5, 0.5}, {0.5, 1.0}, {0.5, 2.0}};
  std::vector<Table1Entry> out;
  for (const auto& c : cols) {
    Table1Entry e;
    e.T_minus = c[0];
    e.T_plus = c[1];
    e.G = kl_constants(KLParams::make(c[0], c[1], 1));
    out.push_back(e);
  }
  return out;
}

std::string format_two_digits(double x) {
  if (x == 0.0) return "0.0";
  int e = static_cast<int>(std::floor(std::log10(std::fabs(x))));
  // two leading digits, half-up on the decimal value: scale by an exact power of ten
  auto digits = [&](int ex) {
    const int s = 1 - ex;
    const double scaled = s >= 0 ? std::fabs(x) * std::pow(10.0, s) : std::fabs(x) / std::pow(10.0, -s);
    return static_cast<long>(std::floor(scaled + 0.5));
  };
  long d = digits(e);
  if (d >= 100) d = digits(++e);
  if (d < 10) d = digits(--e);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%ld.%ld", x < 0 ? "-" : "", d / 10, d % 10);
  std::string out = buf;
  char ebuf[16];
  if (e >= 0)
    std::snprintf(ebuf, sizeof ebuf, "e%02d", e);
  else
    std::snprintf(ebuf, sizeof ebuf, "e%d", e);
  return out + ebuf;
}

std::string table1_csv() {
  std::string out = "T_minus,T_plus,G_KLB1,G_KLB21,G_KLB22\n";
  for (const auto& e : table1()) {
    out += shortest(e.T_minus) + "," + shortest(e.T_plus) + "," + format_two_digits(e.G.G_KLB1) +
           "," + format_two_digits(e.G.G_KLB21) + "," + format_two_digits(e.G.G_KLB22) + "\n";
  }
  return out;
}

}  // namespace smalldiv
