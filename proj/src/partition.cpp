#include "smalldiv/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <unordered_map>
#include <vector>

#include "smalldiv/bounds.hpp"

namespace smalldiv {

std::string to_string(IndexClass::Kind kind) {
  switch (kind) {
    case IndexClass::Kind::away: return "away";
    case IndexClass::Kind::const_type: return "const_type";
    case IndexClass::Kind::brjuno_pos: return "brjuno_pos";
    case IndexClass::Kind::brjuno_neg: return "brjuno_neg";
  }
  return "?";
}

namespace {

bool within_half(const ContinuedFraction& cf, const BigInt& q, const BigInt& p) {
  return compare_linear(cf, q, p, Rational(1, 2)) < 0 && compare_linear(cf, q, p, Rational(-1, 2)) > 0;
}

// (k, a) with q = a q_k, p = a p_k, a <= a*_{k+1}, |q omega - p| < 1/2; q > 0.
std::optional<std::pair<std::size_t, long>> brjuno_match(const ContinuedFraction& cf, const BigInt& q,
                                                         const BigInt& p) {
  for (std::size_t k = 0;; ++k) {
    if (k > cf.depth()) throw DepthExhausted("classify_index: expansion too short for |q|");
    if (cf.q(k) > q) return std::nullopt;
    if (k + 1 > cf.depth()) throw DepthExhausted("classify_index: need a*_{k+1}");
    const BigInt& qk = cf.q(k);
    if (q % qk != 0) continue;
    const BigInt a = q / qk;
    if (a > cf.astar(k + 1) || p != a * cf.p(k)) continue;
    if (!within_half(cf, q, p)) continue;
    return std::make_pair(k, a.get_si());
  }
}

IndexClass away(long n) {
  IndexClass c;
  c.kind = IndexClass::Kind::away;
  c.strip = n;
  return c;
}

// Per-row data for the box: floor(q omega), and the two fractional gaps.
struct Row {
  long fl = 0;
  double frac_lo = 0.0;  // q omega - fl
  double frac_hi = 0.0;  // fl + 1 - q omega
};

struct BrjunoEntry {
  long p = 0;
  std::size_t k = 0;
  long a = 0;
};

struct BoxTables {
  long Q = 0;
  std::vector<Row> rows;  // index q + Q
  std::unordered_map<long, BrjunoEntry> brjuno;  // keyed by q > 0

  const Row& row(long q) const { return rows[static_cast<std::size_t>(q + Q)]; }
};

BoxTables build_tables(const ContinuedFraction& cf, long Q) {
  BoxTables t;
  t.Q = Q;
  t.rows.resize(static_cast<std::size_t>(2 * Q + 1));
  for (long q = 1; q <= Q; ++q) {
    const BigInt bq(q);
    const BigInt fl = floor_linear(cf, bq);
    Row r;
    r.fl = fl.get_si();
    r.frac_lo = small_divisor(cf, bq, fl).value;
    r.frac_hi = -small_divisor(cf, bq, BigInt(fl + 1)).value;
    t.rows[static_cast<std::size_t>(q + Q)] = r;
    Row m;
    m.fl = -r.fl - 1;
    m.frac_lo = r.frac_hi;
    m.frac_hi = r.frac_lo;
    t.rows[static_cast<std::size_t>(Q - q)] = m;
  }
  for (std::size_t k = 0; k + 1 <= cf.depth() && cf.q(k) <= Q; ++k) {
    const long qk = cf.q(k).get_si();
    const long pk = cf.p(k).get_si();
    const long amax = std::min<long>(Q / qk, cf.astar(k + 1) > Q ? Q : cf.astar(k + 1).get_si());
    for (long a = 1; a <= amax; ++a) {
      if (!within_half(cf, BigInt(a * qk), BigInt(a * pk))) continue;
      t.brjuno.emplace(a * qk, BrjunoEntry{a * pk, k, a});
    }
  }
  if (cf.q(cf.depth()) <= Q) throw DepthExhausted("partition: expansion too short for the box");
  return t;
}

struct PairInfo {
  IndexClass cls;
  double L = 0.0;
  double dist = 0.0;  // |q omega - p|
};

PairInfo evaluate(const BoxTables& t, long q, long p, double delta) {
  PairInfo out;
  if (q == 0) {
    out.cls = p < 0 ? away(-p) : away(-p - 1);
    out.dist = static_cast<double>(std::labs(p));
  } else {
    const Row& r = t.row(q);
    const long n = r.fl - p;
    out.dist = n >= 0 ? static_cast<double>(n) + r.frac_lo : static_cast<double>(-n - 1) + r.frac_hi;
    if (n != 0 && n != -1) {
      out.cls = away(n);
    } else {
      out.cls.kind = IndexClass::Kind::const_type;
      const long aq = std::labs(q);
      const long ap = q > 0 ? p : -p;
      auto it = t.brjuno.find(aq);
      if (it != t.brjuno.end() && it->second.p == ap) {
        out.cls.kind = q > 0 ? IndexClass::Kind::brjuno_pos : IndexClass::Kind::brjuno_neg;
        out.cls.k = it->second.k;
        out.cls.a = it->second.a;
      }
    }
  }
  out.L = std::exp(-static_cast<double>(std::labs(p) + std::labs(q)) * delta) / out.dist;
  return out;
}

struct ChunkSums {
  CompensatedSum away, const_type, brjuno, brjuno_k0, crit;
  ClassCounts counts;
};

// rows q in [q0, q1), p in [-Q, Q], in fixed order
void sum_rows(const BoxTables& t, double delta, long q0, long q1, ChunkSums& s) {
  const long Q = t.Q;
  for (long q = q0; q < q1; ++q) {
    for (long p = -Q; p <= Q; ++p) {
      if (q == 0 && p == 0) continue;
      const PairInfo info = evaluate(t, q, p, delta);
      switch (info.cls.kind) {
        case IndexClass::Kind::away:
          s.away += info.L;
          ++s.counts.away;
          break;
        case IndexClass::Kind::const_type:
          s.const_type += info.L;
          ++s.counts.const_type;
          break;
        case IndexClass::Kind::brjuno_pos:
        case IndexClass::Kind::brjuno_neg:
          s.brjuno += info.L;
          if (info.cls.kind == IndexClass::Kind::brjuno_pos)
            ++s.counts.brjuno_pos;
          else
            ++s.counts.brjuno_neg;
          if (info.cls.k == 0) {
            s.brjuno_k0 += info.L;
            ++s.counts.brjuno_k0;
          }
          break;
      }
      if (info.cls.kind != IndexClass::Kind::away)
        s.crit += 2.0 * static_cast<double>(std::labs(q)) *
                  std::exp(-static_cast<double>(std::labs(q) + std::labs(p)) * delta);
    }
  }
}

// Runs fn(chunk_index, q0, q1) over fixed-size row chunks on a thread pool.
template <class Fn>
void for_row_chunks(long Q, std::size_t& n_chunks, Fn fn) {
  constexpr long kChunk = 16;
  const long rows = 2 * Q + 1;
  n_chunks = static_cast<std::size_t>((rows + kChunk - 1) / kChunk);
  const unsigned nt = std::max(1u, std::min<unsigned>(worker_threads(), static_cast<unsigned>(n_chunks)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < n_chunks; c += nt) {
        const long q0 = -Q + static_cast<long>(c) * kChunk;
        fn(c, q0, std::min(q0 + kChunk, Q + 1));
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::size_t chunk_count(long Q) { return static_cast<std::size_t>((2 * Q + 1 + 15) / 16); }

}  // namespace

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SMALLDIV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

IndexClass classify_index(const BigInt& q, const BigInt& p, const ContinuedFraction& cf) {
  if (q == 0 && p == 0) throw DomainError("classify_index: (0,0) has no class");
  if (q == 0) return p < 0 ? away(BigInt(-p).get_si()) : away(BigInt(-p - 1).get_si());
  const BigInt fl = floor_linear(cf, q);
  const BigInt n = fl - p;
  if (n != 0 && n != -1) return away(n.get_si());
  IndexClass c;
  c.kind = IndexClass::Kind::const_type;
  const BigInt aq = abs(q);
  const BigInt ap = q > 0 ? p : BigInt(-p);
  if (auto m = brjuno_match(cf, aq, ap)) {
    c.kind = q > 0 ? IndexClass::Kind::brjuno_pos : IndexClass::Kind::brjuno_neg;
    c.k = m->first;
    c.a = m->second;
  }
  return c;
}

LValue L_value(const BigInt& q, const BigInt& p, double delta, const ContinuedFraction& cf) {
  if (q == 0 && p == 0) throw DomainError("L_value: (0,0) excluded");
  if (!(delta > 0.0)) throw DomainError("L_value: delta must be positive");
  const DivisorEstimate d = small_divisor(cf, q, p);
  const double weight = static_cast<double>(to_long_double(BigInt(abs(p) + abs(q)))) * delta;
  LValue v;
  v.log_value = -weight - std::log(std::fabs(d.value));
  v.value = std::exp(-weight) / std::fabs(d.value);
  v.rel_error = d.rel_error + 4.0 * kUlp;
  return v;
}

PartitionSums partition_sums(const ContinuedFraction& cf, double delta, long Q) {
  if (Q < 1) throw DomainError("partition_sums: Q must be >= 1");
  if (!(delta > 0.0)) throw DomainError("partition_sums: delta must be positive");
  const BoxTables t = build_tables(cf, Q);
  std::vector<ChunkSums> parts(chunk_count(Q));
  std::size_t n_chunks = 0;
  for_row_chunks(Q, n_chunks, [&](std::size_t c, long q0, long q1) { sum_rows(t, delta, q0, q1, parts[c]); });

  CompensatedSum away_s, ct, br, k0, crit;
  PartitionSums out;
  for (const auto& s : parts) {
    away_s += s.away.value();
    ct += s.const_type.value();
    br += s.brjuno.value();
    k0 += s.brjuno_k0.value();
    crit += s.crit.value();
    out.counts.away += s.counts.away;
    out.counts.const_type += s.counts.const_type;
    out.counts.brjuno_pos += s.counts.brjuno_pos;
    out.counts.brjuno_neg += s.counts.brjuno_neg;
    out.counts.brjuno_k0 += s.counts.brjuno_k0;
  }
  out.away = away_s.value();
  out.const_type = ct.value();
  out.brjuno = br.value();
  out.brjuno_k0 = k0.value();
  out.total = out.away + out.const_type + out.brjuno;
  out.Q = Q;
  out.delta = delta;
  out.crit_majorant = crit.value();
  // outside the box |q omega - p| >= 1 on Away, and 4s pairs have |p|+|q| = s
  const double x = std::exp(-delta);
  const double N = static_cast<double>(Q + 1);
  out.away_tail_bound = 4.0 * std::pow(x, N) * (N - (N - 1.0) * x) / ((1.0 - x) * (1.0 - x));
  return out;
}

double brute_force_box_sum(const ContinuedFraction& cf, double delta, long Q) {
  if (Q < 1) throw DomainError("brute_force_box_sum: Q must be >= 1");
  std::vector<CompensatedSum> parts(chunk_count(Q));
  std::size_t n_chunks = 0;
  for_row_chunks(Q, n_chunks, [&](std::size_t c, long q0, long q1) {
    for (long q = q0; q < q1; ++q)
      for (long p = -Q; p <= Q; ++p) {
        if (q == 0 && p == 0) continue;
        parts[c] += L_value(BigInt(q), BigInt(p), delta, cf).value;
      }
  });
  CompensatedSum s;
  for (const auto& c : parts) s += c.value();
  return s.value();
}

void write_partition_csv(std::ostream& os, const ContinuedFraction& cf, double delta, long Q) {
  const BoxTables t = build_tables(cf, Q);
  os << "q,p,class,k,a,strip_n,L\n";
  char buf[64];
  for (long q = -Q; q <= Q; ++q)
    for (long p = -Q; p <= Q; ++p) {
      if (q == 0 && p == 0) continue;
      const PairInfo info = evaluate(t, q, p, delta);
      os << q << ',' << p << ',' << to_string(info.cls.kind) << ',';
      if (info.cls.brjuno()) os << info.cls.k << ',' << info.cls.a;
      else os << ',';
      os << ',';
      if (info.cls.kind == IndexClass::Kind::away) os << info.cls.strip;
      std::snprintf(buf, sizeof buf, ",%.17g\n", info.L);
      os << buf;
    }
}

BoundReport verify_legendre(const ContinuedFraction& cf, long Q) {
  if (Q < 1) throw DomainError("verify_legendre: Q must be >= 1");
  const BoxTables t = build_tables(cf, Q);
  std::size_t checked = 0, violations = 0;
  std::string first;
  double min_ratio = INFINITY;
  for (long q = 1; q <= Q; ++q) {
    const Row& r = t.row(q);
    for (long p : {r.fl, r.fl + 1}) {
      const PairInfo info = evaluate(t, q, p, 1.0);
      if (info.cls.kind != IndexClass::Kind::const_type) continue;
      ++checked;
      const Rational bound(BigInt(1), BigInt(2 * q));
      const bool above = p == r.fl;  // q omega - p > 0
      const bool ok = above ? compare_linear(cf, BigInt(q), BigInt(p), bound) > 0
                            : compare_linear(cf, BigInt(q), BigInt(p), Rational(-bound)) < 0;
      min_ratio = std::min(min_ratio, 2.0 * static_cast<double>(q) * info.dist);
      if (!ok) {
        if (violations == 0) first = "(q,p)=(" + std::to_string(q) + "," + std::to_string(p) + ")";
        ++violations;
      }
    }
  }
  BoundReport rep = BoundReport::make(
      "legendre_violations", static_cast<double>(violations), 0.0,
      {{"Q", static_cast<double>(Q)}, {"checked", static_cast<double>(checked)},
       {"min_2q_dist", min_ratio}},
      violations ? "first violation at " + first : "");
  return rep;
}

BoundReport away_bound_check(const ContinuedFraction& cf, const PartitionSums& s, double mu) {
  const double delta = s.delta;
  if (!(std::log(1.0 / delta) > 1.0)) throw DomainError("away_bound_check: need log(1/delta) > 1");
  const Interval w = omega_interval(cf);
  const double G = 4.0 / (1.0 + w.lo) + 2.0 / (1.0 - w.hi);
  return BoundReport::make("sigma_away", s.away, mu * G / delta * std::log(1.0 / delta),
                           {{"delta", delta}, {"Q", static_cast<double>(s.Q)}, {"mu", mu}, {"G_away", G},
                            {"tail_bound", s.away_tail_bound}});
}

BoundReport const_type_bound_check(const ContinuedFraction& cf, const PartitionSums& s, double mu) {
  const Interval w = omega_interval(cf);
  const double G = 8.0 / ((1.0 + w.lo) * (1.0 + w.lo));
  const double bound = mu * G / (s.delta * s.delta);
  // both links of the chain must hold; report the tighter one
  BoundReport r = BoundReport::make("sigma_const_type", s.const_type, std::min(bound, s.crit_majorant),
                                    {{"delta", s.delta}, {"Q", static_cast<double>(s.Q)}, {"mu", mu},
                                     {"G_const_type", G}, {"crit_majorant", s.crit_majorant},
                                     {"closed_bound", bound}});
  if (s.crit_majorant > bound) {
    r.verdict = false;
    r.note = "critical-strip majorant exceeds the closed bound";
  }
  return r;
}

BoundReport brjuno_bound_check(const ContinuedFraction& cf, const PartitionSums& s, std::size_t depth,
                               bool include_k0, double mu) {
  const Interval w = omega_interval(cf);
  const double Delta = (1.0 + w.lo) * s.delta;
  const auto cert = rule_growth_certificate(cf);
  const BrjunoValue b1 = brj1(cf, Delta, depth, cert);
  const BrjunoValue b2 = brj2(cf, 2.0 * Delta, depth, cert);
  const double eps = mu - 1.0;
  // without a certificate the truncated value is used: a smaller right-hand side
  const double rhs = 2.0 * ((2.0 + eps) * b1.upper() + (1.0 + eps) * b2.upper());
  const double lhs = include_k0 ? s.brjuno : s.brjuno_k_ge_1();
  return BoundReport::make(include_k0 ? "sigma_brjuno" : "sigma_brjuno_k_ge_1", lhs, rhs,
                           {{"delta", s.delta}, {"Delta", Delta}, {"Q", static_cast<double>(s.Q)},
                            {"mu", mu}, {"depth", static_cast<double>(depth)},
                            {"brj1", b1.value}, {"brj2", b2.value}},
                           b1.rigorous() ? "rigorous tails" : "truncated series, no tail");
}

}  // namespace smalldiv
