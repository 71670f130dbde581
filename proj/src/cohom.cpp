#include "smalldiv/cohom.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "smalldiv/bounds.hpp"

namespace smalldiv {

void ModeMap::set(long p, long q, Complex c) {
  if (p == 0 && q == 0) throw DomainError("ModeMap: the (0,0) mode is excluded");
  entries[{p, q}] = c;
}

void ModeMap::set_pair(long p, long q, Complex c) {
  set(p, q, c);
  set(-p, -q, std::conj(c));
}

Complex ModeMap::get(long p, long q) const {
  auto it = entries.find({p, q});
  return it == entries.end() ? Complex{} : it->second;
}

bool ModeMap::symmetric() const {
  for (const auto& [idx, c] : entries) {
    auto it = entries.find({-idx.first, -idx.second});
    if (it == entries.end() || it->second != std::conj(c)) return false;
  }
  return true;
}

ModeMap operator+(const ModeMap& a, const ModeMap& b) {
  ModeMap out = a;
  for (const auto& [idx, c] : b.entries) out.entries[idx] += c;
  out.hermitian = a.hermitian && b.hermitian;
  return out;
}

SolvedModes solve_modes(const ModeMap& a, const ContinuedFraction& cf) {
  SolvedModes out;
  out.g.hermitian = a.hermitian;
  if (a.hermitian && !a.symmetric()) throw DomainError("solve_modes: hermitian flag set but symmetry fails");
  for (const auto& [idx, c] : a.entries) {
    const auto [p, q] = idx;
    if (p == 0 && q == 0) throw DomainError("solve_modes: (0,0) mode has no solution");
    if (a.hermitian && idx < ModeIndex{-p, -q}) continue;  // filled from its partner
    const DivisorEstimate d = small_divisor(cf, BigInt(q), BigInt(p));  // q omega - p
    // 1 / (i (p - q omega)) = i / d
    const Complex g = Complex(0.0, 1.0) * c / d.value;
    const double err = d.rel_error + 2.0 * kUlp;
    out.g.entries[idx] = g;
    out.rel_error[idx] = err;
    if (a.hermitian) {
      out.g.entries[{-p, -q}] = std::conj(g);
      out.rel_error[{-p, -q}] = err;
    }
  }
  return out;
}

double decay_constant(const ModeMap& modes, double rho) {
  double m = 0.0;
  for (const auto& [idx, c] : modes.entries) {
    if (c == Complex{}) continue;
    const double w = rho * static_cast<double>(std::labs(idx.first) + std::labs(idx.second));
    m = std::max(m, std::exp(std::log(std::abs(c)) + w));
  }
  return m;
}

namespace {

double sampled_sup(const ModeMap& modes, double R, int n) {
  if (modes.empty()) return 0.0;
  long pmin = 0, pmax = 0, qmin = 0, qmax = 0;
  bool first = true;
  for (const auto& [idx, c] : modes.entries) {
    if (first) {
      pmin = pmax = idx.first;
      qmin = qmax = idx.second;
      first = false;
    }
    pmin = std::min(pmin, idx.first);
    pmax = std::max(pmax, idx.first);
    qmin = std::min(qmin, idx.second);
    qmax = std::max(qmax, idx.second);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  const double P = static_cast<double>(pmax - pmin + 1);
  const double Qw = static_cast<double>(qmax - qmin + 1);
  double best = 0.0;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      // x = s + i s1 R, y = t + i s2 R: |e^{i(px - qy)}| = e^{-p s1 R + q s2 R}
      auto scaled = [&](long p, long q, Complex c) {
        const double lm = std::log(std::abs(c)) - static_cast<double>(p) * s1 * R +
                          static_cast<double>(q) * s2 * R;
        return std::polar(std::exp(lm), std::arg(c));
      };
      if (P * Qw <= double(1 << 20)) {
        const Eigen::Index np = static_cast<Eigen::Index>(P), nq = static_cast<Eigen::Index>(Qw);
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(np, nq);
        for (const auto& [idx, c] : modes.entries) {
          if (c == Complex{}) continue;
          C(idx.first - pmin, idx.second - qmin) = scaled(idx.first, idx.second, c);
        }
        Eigen::MatrixXcd E(n, np), F(nq, n);
        for (int j = 0; j < n; ++j)
          for (Eigen::Index k = 0; k < np; ++k)
            E(j, k) = std::polar(1.0, static_cast<double>(pmin + k) * two_pi * j / n);
        for (Eigen::Index k = 0; k < nq; ++k)
          for (int j = 0; j < n; ++j)
            F(k, j) = std::polar(1.0, -static_cast<double>(qmin + k) * two_pi * j / n);
        const Eigen::MatrixXcd f = E * C * F;
        best = std::max(best, f.cwiseAbs().maxCoeff());
      } else {
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Complex acc{};
            for (const auto& [idx, c] : modes.entries) {
              if (c == Complex{}) continue;
              const double ph = std::fmod(static_cast<double>(idx.first) * two_pi * j / n -
                                              static_cast<double>(idx.second) * two_pi * k / n,
                                          two_pi);
              acc += scaled(idx.first, idx.second, c) * std::polar(1.0, ph);
            }
            best = std::max(best, std::abs(acc));
          }
      }
    }
  return best;
}

}  // namespace

StripNormEstimate strip_norm(const ModeMap& modes, double R, int grid_n) {
  if (!(R > 0.0)) throw DomainError("strip_norm: R must be positive");
  if (grid_n < 8) throw DomainError("strip_norm: grid_n must be >= 8");
  StripNormEstimate e;
  e.R = R;
  e.grid_n = grid_n;
  CompensatedSum s;
  for (const auto& [idx, c] : modes.entries) {
    if (c == Complex{}) continue;
    const double w = R * static_cast<double>(std::labs(idx.first) + std::labs(idx.second));
    s += std::exp(std::log(std::abs(c)) + w);
  }
  e.upper = s.value();
  e.sampled_lower = sampled_sup(modes, R, grid_n);
  return e;
}

BoundReport check_thm1(const ModeMap& a, const ContinuedFraction& cf, double rho, double delta,
                       double mu, std::size_t depth, int grid_n) {
  const SolvedModes g = solve_modes(a, cf);
  const StripNormEstimate ng = strip_norm(g.g, rho - delta, grid_n);
  const StripNormEstimate na = strip_norm(a, rho, grid_n);
  const GammaDelta gd = gamma_delta(cf, rho, delta, depth, mu);
  return BoundReport::make("g_norm_sampled", ng.sampled_lower, mu * gd.Gamma0 * na.upper,
                           {{"rho", rho}, {"delta", delta}, {"mu", mu}, {"Gamma0", gd.Gamma0},
                            {"a_norm_upper", na.upper}, {"g_norm_upper", ng.upper},
                            {"decay_A", decay_constant(a, rho)}, {"modes", static_cast<double>(a.size())}},
                           gd.brj.rigorous() ? "" : "Gamma0 uses a truncated Brjuno series");
}

ModeMap random_decaying_modes(const RandomModeSpec& spec) {
  if (spec.max_index < 1) throw DomainError("random_decaying_modes: max_index must be >= 1");
  const std::size_t room = static_cast<std::size_t>((2 * spec.max_index + 1) * (2 * spec.max_index + 1) - 1);
  if (spec.modes > room) throw DomainError("random_decaying_modes: more modes than indices");
  if (spec.hermitian && spec.modes % 2 == 1)
    throw DomainError("random_decaying_modes: hermitian maps need an even mode count");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<long> idx(-spec.max_index, spec.max_index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModeMap m;
  m.hermitian = spec.hermitian;
  while (m.size() < spec.modes) {
    const long p = idx(rng), q = idx(rng);
    if ((p == 0 && q == 0) || m.entries.count({p, q})) continue;
    const double mag = spec.A * (1.0 - unit(rng)) * std::exp(-spec.rho * static_cast<double>(std::labs(p) + std::labs(q)));
    const Complex c = std::polar(mag, 2.0 * std::numbers::pi * unit(rng));
    if (spec.hermitian)
      m.set_pair(p, q, c);
    else
      m.set(p, q, c);
  }
  return m;
}

namespace {

double round_up(double x) { return std::nextafter(x, INFINITY); }

// Interval for log|q_n omega - p_n| = -log(q_{n+1} + q_n t), t = [0; a_{n+2}, ...].
Interval log_distance(const ContinuedFraction& cf, std::size_t n) {
  const std::size_t d = cf.depth();
  const auto& nl = cf.next_log_quotient();
  double lo, hi;
  if (n + 1 <= d) {
    const double lq1 = log_abs(cf.q(n + 1));
    const double r = ratio_to_double(cf.q(n), cf.q(n + 1));
    double t_lo = 0.0, t_hi = 1.0;
    if (n + 2 <= d) {
      const double la = log_abs(cf.a(n + 2));
      t_hi = std::exp(-la);
      t_lo = t_hi / (1.0 + t_hi);
    } else if (nl) {
      t_hi = std::exp(-nl->lo);
      const double e = std::exp(-nl->hi);
      t_lo = e / (1.0 + e);
    }
    lo = -(lq1 + std::log1p(r * t_hi));
    hi = -(lq1 + std::log1p(r * t_lo));
  } else if (n == d && nl) {
    const double lqn = log_abs(cf.q(n));
    // a q_n < q_{n+1} + q_n t < (a + 2) q_n with log a in nl
    lo = -(nl->hi + lqn + 2.0 * std::exp(-nl->lo));
    hi = -(nl->lo + lqn);
  } else {
    throw DepthExhausted("blowup_witness: q_{n+1} unknown at n = " + std::to_string(n));
  }
  const double slack = 8.0 * kUlp * (std::fabs(lo) + 1.0);
  return {lo - slack, hi + slack};
}

}  // namespace

AlphaReport alpha_normalization(const ContinuedFraction& cf, std::size_t n_max) {
  if (n_max < 1) throw DomainError("alpha_normalization: n_max must be >= 1");
  if (n_max > cf.depth()) throw DepthExhausted("alpha_normalization: n_max beyond expansion");
  const std::size_t d = cf.depth();
  const auto& nl = cf.next_log_quotient();
  AlphaReport r;
  r.n_max = n_max;
  Rational trunc = 0;
  for (std::size_t n = 1; n <= n_max; ++n) trunc += Rational(BigInt(1), cf.q(n));
  Rational tail;
  if (n_max + 2 <= d) {
    tail = 2 * (Rational(BigInt(1), cf.q(n_max + 1)) + Rational(BigInt(1), cf.q(n_max + 2)));
  } else if (n_max + 1 == d && nl) {
    // 1/q_{m+2} <= 1/(a_{m+2} q_{m+1})
    const double inv = round_up(std::exp(-nl->lo - log_abs(cf.q(n_max + 1))) * (1.0 + 4.0 * kUlp));
    tail = 2 * (Rational(BigInt(1), cf.q(n_max + 1)) + Rational(std::max(inv, std::numeric_limits<double>::denorm_min())));
    r.tail_from_log = true;
  } else if (n_max == d && nl) {
    // 1/q_{m+2} <= 1/q_{m+1} <= 1/(a_{m+1} q_m)
    const double inv = round_up(std::exp(-nl->lo - log_abs(cf.q(n_max))) * (1.0 + 4.0 * kUlp));
    tail = 4 * Rational(std::max(inv, std::numeric_limits<double>::denorm_min()));
    r.tail_from_log = true;
  } else {
    throw DepthExhausted("alpha_normalization: need q_{n_max+2} or a logged next quotient");
  }
  tail.canonicalize();
  const Rational hi = trunc + tail;
  const Rational two_sum = trunc / hi;
  const Rational lower = 1 - tail / trunc;
  r.alpha_bar_trunc = trunc.get_d();
  r.tail = tail.get_d();
  r.alpha_bar_hi = hi.get_d();
  r.two_sum_alpha = two_sum.get_d();
  r.lower = lower.get_d();
  r.holds = lower <= two_sum && two_sum <= 1;
  r.log_alpha_bar_hi = std::log(r.alpha_bar_hi);
  return r;
}

Counterexample counterexample_modes(const ContinuedFraction& cf, double rho, double epsilon,
                                    std::size_t n_max) {
  if (!(epsilon > 0.0)) throw DomainError("counterexample_modes: epsilon must be positive");
  if (!(rho > 0.0)) throw DomainError("counterexample_modes: rho must be positive");
  Counterexample out;
  out.alpha = alpha_normalization(cf, n_max);
  out.modes.hermitian = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const BigInt& p = cf.p(n);
    const BigInt& q = cf.q(n);
    if (!p.fits_slong_p() || !q.fits_slong_p())
      throw DomainError("counterexample_modes: (p_n, q_n) exceeds the mode index range");
    const double log_alpha = -std::numbers::ln2 - out.alpha.log_alpha_bar_hi - log_abs(q);
    const double lc = std::log(epsilon) - rho * static_cast<double>(to_long_double(BigInt(p + q))) + log_alpha;
    out.modes.set_pair(p.get_si(), q.get_si(), Complex(exp_or_zero(lc), 0.0));
  }
  out.norm_upper = strip_norm(out.modes, rho, 8).upper;
  return out;
}

std::vector<WitnessEntry> blowup_witness(const ContinuedFraction& cf, double rho, double delta_prime,
                                         double epsilon, std::size_t n_max) {
  if (!(delta_prime > 0.0 && delta_prime < rho))
    throw DomainError("blowup_witness: need 0 < delta' < rho");
  if (!(epsilon > 0.0)) throw DomainError("blowup_witness: epsilon must be positive");
  const AlphaReport alpha = alpha_normalization(cf, n_max);
  std::vector<WitnessEntry> out;
  const double le = std::log(epsilon);
  for (std::size_t n = 1; n <= n_max; ++n) {
    WitnessEntry w;
    w.n = n;
    w.p = cf.p(n);
    w.q = cf.q(n);
    const double s = static_cast<double>(to_long_double(BigInt(w.p + w.q)));
    const double log_alpha = -std::numbers::ln2 - alpha.log_alpha_bar_hi - log_abs(w.q);
    const Interval ld = log_distance(cf, n);
    // e^{(rho-delta') s} * eps e^{-rho s} alpha_n / |q omega - p|
    const double base = (rho - delta_prime) * s + le - rho * s + log_alpha;
    w.log_w_lo = base - ld.hi;
    w.log_w_hi = base - ld.lo;
    w.log_w_direct = le - delta_prime * s + log_alpha - ld.mid();
    const double routed = base - ld.mid();
    w.identity_ok = std::fabs(routed - w.log_w_direct) <= 1e-9 * std::max(1.0, std::fabs(w.log_w_direct));
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<DivergenceCheck> divergence_diagnostic(const ContinuedFraction& cf, double Delta) {
  std::vector<DivergenceCheck> out;
  const auto& nl = cf.next_log_quotient();
  for (std::size_t n = 2; n <= cf.depth(); ++n) {
    double lq1;
    if (n + 1 <= cf.depth())
      lq1 = log_abs(cf.q(n + 1));
    else if (nl)
      lq1 = nl->lo + log_abs(cf.q(n));
    else
      break;
    DivergenceCheck c;
    c.n = n;
    c.log_lhs = lq1 - static_cast<double>(to_long_double(cf.q(n)) * Delta);
    c.log_rhs = -log_abs(cf.q(n));
    c.holds = c.log_lhs >= c.log_rhs;
    out.push_back(c);
  }
  return out;
}

}  // namespace smalldiv
