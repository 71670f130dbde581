#pragma once

#include <cstddef>
#include <ostream>
#include <string>

#include "smalldiv/contfrac.hpp"
#include "smalldiv/report.hpp"

namespace smalldiv {

struct IndexClass {
  enum class Kind { away, const_type, brjuno_pos, brjuno_neg };

  Kind kind = Kind::away;
  long strip = 0;     // away only; n with n < q omega - p < n + 1
  std::size_t k = 0;  // brjuno only
  long a = 0;         // brjuno only

  bool brjuno() const { return kind == Kind::brjuno_pos || kind == Kind::brjuno_neg; }
  bool operator==(const IndexClass&) const = default;
};

std::string to_string(IndexClass::Kind kind);

// Exact classification of (q, p) != (0, 0). For q = 0 the value -p sits on a
// strip boundary; it is put in Away(-p) for p < 0 and Away(-p-1) for p > 0.
IndexClass classify_index(const BigInt& q, const BigInt& p, const ContinuedFraction& cf);

struct LValue {
  double value = 0.0;
  double log_value = 0.0;
  double rel_error = 0.0;
};

// e^{-(|p|+|q|) delta} / |q omega - p|
LValue L_value(const BigInt& q, const BigInt& p, double delta, const ContinuedFraction& cf);

struct ClassCounts {
  std::size_t away = 0;
  std::size_t const_type = 0;
  std::size_t brjuno_pos = 0;
  std::size_t brjuno_neg = 0;
  std::size_t brjuno_k0 = 0;

  std::size_t total() const { return away + const_type + brjuno_pos + brjuno_neg; }
};

struct PartitionSums {
  double away = 0.0;
  double const_type = 0.0;
  double brjuno = 0.0;
  double brjuno_k0 = 0.0;  // part of brjuno coming from k = 0
  double total = 0.0;
  long Q = 0;
  double delta = 0.0;
  ClassCounts counts;
  double crit_majorant = 0.0;    // box sum over the critical strip of 2|q| e^{-(|q|+|p|) delta}
  double away_tail_bound = 0.0;  // bound on the Away sum outside the box

  double brjuno_k_ge_1() const { return brjuno - brjuno_k0; }
};

// Thread count for box work: SMALLDIV_THREADS if set, else hardware concurrency.
unsigned worker_threads();

PartitionSums partition_sums(const ContinuedFraction& cf, double delta, long Q);

// Unclassified sum of L_value over the same box, each pair through its own exact path.
double brute_force_box_sum(const ContinuedFraction& cf, double delta, long Q);

// Writes q,p,class,k,a,strip_n,L for every box pair.
void write_partition_csv(std::ostream& os, const ContinuedFraction& cf, double delta, long Q);

BoundReport verify_legendre(const ContinuedFraction& cf, long Q);

BoundReport away_bound_check(const ContinuedFraction& cf, const PartitionSums& sums, double mu = 1.25);
BoundReport const_type_bound_check(const ContinuedFraction& cf, const PartitionSums& sums,
                                   double mu = 1.25);
// Compares the Brjuno sum (include_k0: full, else k >= 1) against
// 2[(2+eps) brj1(Delta) + (1+eps) brj2(2 Delta)], eps = mu - 1.
BoundReport brjuno_bound_check(const ContinuedFraction& cf, const PartitionSums& sums,
                               std::size_t depth, bool include_k0, double mu = 1.25);

}  // namespace smalldiv
