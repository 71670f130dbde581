// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "smalldiv/bounds.hpp"
#include "smalldiv/classify.hpp"
#include "smalldiv/cohom.hpp"
#include "smalldiv/frequency_parser.hpp"
#include "smalldiv/partition.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace smalldiv;

namespace {

// pi - 3 to 40 digits: [7, 15, 1, 292, 1, 1, 1, 2, 1, 3, ...]
const char* kPiSpec = "rational:1415926535897932384626433832795028841971/10000000000000000000000000000000000000000";

const std::vector<std::string> kCorpus = {"golden", "surd:[;2]", kPiSpec};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failed = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) o.require(false, "runtime " + fmt("%.2f", secs) + " s > " + fmt("%.0f", budget_s) + " s");
  std::printf("%s criterion %d (%s) [%.2f s]%s%s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  for (const auto& f : o.failures) std::printf("    - %s\n", f.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failed;
}

std::vector<double> log_grid(double lo, double hi, int steps) {
  std::vector<double> g;
  for (int i = 0; i < steps; ++i) g.push_back(lo * std::pow(hi / lo, steps == 1 ? 0.0 : double(i) / (steps - 1)));
  return g;
}

}  // namespace

int main() {
  criterion(1, "table1 reproduction", 1.0, [] {
    struct Row {
      double tm, tp;
      const char* shown[3];
    };
    const Row rows[] = {{0.0, 0.0, {"5.3e00", "1.6e00", "0.0"}},    {0.1, 0.1, {"6.7e00", "4.8e00", "6.2e-1"}},
                        {0.1, 0.5, {"1.2e01", "1.8e01", "5.2e00"}}, {0.1, 1.0, {"3.0e01", "6.8e01", "3.2e01"}},
                        {0.1, 2.0, {"2.8e02", "1.0e03", "7.2e02"}}, {0.2, 0.5, {"1.6e01", "2.6e01", "1.0e01"}},
                        {0.2, 1.0, {"4.6e01", "1.1e02", "6.2e01"}}, {0.2, 2.0, {"5.8e02", "2.2e03", "1.8e03"}},
                        {0.5, 0.5, {"1.0e02", "2.5e02", "2.2e02"}}, {0.5, 1.0, {"7.1e02", "2.3e03", "2.6e03"}},
                        {0.5, 2.0, {"6.6e04", "3.1e05", "4.8e05"}}};
    Outcome o;
    auto t = table1();
    o.require(t.size() == 11, "column count");
    int exact = 0, near = 0;
    for (std::size_t i = 0; i < 11 && i < t.size(); ++i) {
      const double got[3] = {t[i].G.G_KLB1, t[i].G.G_KLB21, t[i].G.G_KLB22};
      for (int j = 0; j < 3; ++j) {
        const std::string disp = format_two_digits(got[j]);
        const double d = std::stod(rows[i].shown[j]);
        const double unit = d == 0.0 ? 0.1 : std::pow(10.0, std::floor(std::log10(d)) - 1);
        if (std::fabs(got[j] - d) < unit) ++near;
        if (disp == rows[i].shown[j]) {
          ++exact;
          continue;
        }
        o.require(false, fmt("(%.1f, ", rows[i].tm) + fmt("%.1f) column ", rows[i].tp) + std::to_string(j) +
                             ": " + disp + " vs displayed " + rows[i].shown[j]);
      }
    }
    o.require(near == 33, "within one unit of the last displayed digit: " + std::to_string(near) + "/33");
    o.detail = std::to_string(exact) + "/33 entries match the displayed digits, " + std::to_string(near) +
               "/33 within one unit";
    return o;
  });

  criterion(2, "universal constants", 5.0, [] {
    Outcome o;
    const auto& k = universal_constants();
    const auto l = levy_example_bound();
    const double ratio = k.kappa_prime / k.kappa;
    o.require(std::fabs(k.kappa - 0.988) <= 0.001, "kappa = " + fmt("%.10f", k.kappa));
    o.require(std::fabs(k.kappa_prime - 1.410) <= 0.001, "kappa' = " + fmt("%.10f", k.kappa_prime));
    o.require(std::fabs(ratio - 1.4278) <= 0.0005,
              "kappa'/kappa = " + fmt("%.6f", ratio) + ", expected 1.4278 +- 0.0005");
    o.require(std::fabs(T_minus_max() - 0.507) <= 0.001, "T-max = " + fmt("%.6f", T_minus_max()));
    o.require(std::fabs(l.ell - M_PI * M_PI / (12 * std::log(2.0))) <= 1e-12, "ell = " + fmt("%.10f", l.ell));
    o.require(std::fabs(l.G_example - 3.9658) <= 0.001, "G_Example = " + fmt("%.6f", l.G_example));
    o.detail = "kappa=" + fmt("%.10f", k.kappa) + " kappa'=" + fmt("%.10f", k.kappa_prime) + " ratio=" +
               fmt("%.6f", ratio) + " T-max=" + fmt("%.6f", T_minus_max()) + " ell=" + fmt("%.6f", l.ell) +
               " G_Example=" + fmt("%.6f", l.G_example);
    return o;
  });

  criterion(3, "partition oracle", 30.0, [] {
    Outcome o;
    int cases = 0;
    for (const auto& s : kCorpus) {
      auto cf = expand(parse_frequency(s), 80);
      for (double delta : {0.05, 0.1, 0.2}) {
        const long Q = 200;
        auto sums = partition_sums(cf, delta, Q);
        const double bf = brute_force_box_sum(cf, delta, Q);
        const double parts = sums.away + sums.const_type + sums.brjuno;
        const std::string tag = s.substr(0, 12) + fmt(" delta=%.2f", delta);
        o.require(std::fabs(parts - bf) <= 1e-12 * bf, tag + ": parts " + fmt("%.17g", parts) + " vs " + fmt("%.17g", bf));
        o.require(sums.counts.total() == static_cast<std::size_t>((2 * Q + 1) * (2 * Q + 1) - 1), tag + ": counts");
        o.require(sums.counts.brjuno_pos == sums.counts.brjuno_neg, tag + ": Brjuno symmetry");
        ++cases;
      }
    }
    o.detail = std::to_string(cases) + " (frequency, delta) cases at Q = 200";
    return o;
  });

  criterion(4, "Legendre exhaustive check", 60.0, [] {
    Outcome o;
    for (const auto& s : kCorpus) {
      auto r = verify_legendre(expand(parse_frequency(s), 80), 10000);
      o.require(r.verdict && r.computed == 0.0, s.substr(0, 12) + ": " + fmt("%.0f violations", r.computed));
    }
    o.detail = "Q = 10000, three frequencies";
    return o;
  });

  criterion(5, "nint lemma", 0.0, [] {
    Outcome o;
    std::size_t checked = 0, degenerate = 0;
    auto all = kCorpus;
    all.push_back("surd:[;1,40]");
    for (const auto& s : all) {
      auto cf = expand(parse_frequency(s), 60);
      for (const auto& c : verify_nint_lemma(cf, 20)) {
        ++checked;
        if (c.verdict == NintVerdict::degenerate) {
          ++degenerate;
          o.require(c.k == 0, s.substr(0, 12) + ": degenerate at k = " + std::to_string(c.k));
        }
        o.require(c.verdict != NintVerdict::fails, s.substr(0, 12) + ": fails at k = " + std::to_string(c.k));
      }
    }
    o.detail = std::to_string(checked) + " (k, a) pairs, " + std::to_string(degenerate) + " degenerate at k = 0";
    return o;
  });

  criterion(6, "bound-chain suite", 0.0, [] {
    Outcome o;
    std::size_t checks = 0;
    double min_margin = INFINITY;
    auto take = [&](const BoundReport& r, const std::string& tag) {
      ++checks;
      min_margin = std::min(min_margin, r.margin);
      o.require(r.verdict, tag + ": " + r.quantity + fmt(" margin %.6g", r.margin));
    };
    for (const char* s : {"golden", "surd:[;2]", "surd:[;1,40]"}) {
      auto cf = expand(parse_frequency(s), 80);
      auto cert = rule_growth_certificate(cf);
      if (!cert || !std::holds_alternative<DiophantineGrowth>(*cert)) {
        o.require(false, std::string(s) + ": no Diophantine certificate");
        continue;
      }
      const double C_rule = std::get<DiophantineGrowth>(*cert).C;
      for (double tau : {1.0, 1.5, 2.0})
        for (double C : {C_rule, diophantine_constant(cf, tau, 60).C_recursive})
          for (double D : log_grid(1e-3, 0.999 * dioph_delta_threshold(tau), 12))
            for (int which : {1, 2})
              take(dioph_chain_check(cf, {C, tau}, D, 60, which),
                   std::string(s) + fmt(" tau=%.1f", tau) + fmt(" C=%.4g", C) + fmt(" D=%.4g", D));
    }
    struct KLCase {
      const char* s;
      double tm, tp;
    };
    for (const KLCase& c : {KLCase{"surd:[;3]", 0.0, 0.0}, KLCase{"surd:[;2]", 0.3, 0.0}}) {
      auto cf = expand(parse_frequency(c.s), 80);
      const auto params = KLParams::make(c.tm, c.tp);
      o.require(kl_membership(cf, params, 60).KLBrj, std::string(c.s) + ": KL membership");
      for (double D : log_grid(1e-3, 2.0, 12))
        for (int which : {1, 2}) take(kl_chain_check(cf, params, D, 60, which), std::string(c.s) + fmt(" D=%.4g", D));
    }
    for (const char* s : {"golden", "surd:[;2]"}) {
      auto cf = expand(parse_frequency(s), 80);
      for (double delta : {0.1, 0.05}) {
        auto sums = partition_sums(cf, delta, 500);
        const std::string tag = std::string(s) + fmt(" delta=%.2f", delta);
        take(away_bound_check(cf, sums), tag);
        take(const_type_bound_check(cf, sums), tag);
        take(brjuno_bound_check(cf, sums, 60, true), tag);
        take(brjuno_bound_check(cf, sums, 60, false), tag);
      }
    }
    o.detail = std::to_string(checks) + " inequalities, min margin " + fmt("%.6g", min_margin);
    return o;
  });

  criterion(7, "Theorem 1 end to end", 60.0, [] {
    Outcome o;
    std::size_t runs = 0;
    double min_ratio = INFINITY;
    for (const char* s : {"golden", "surd:[;2]"}) {
      auto cf = expand(parse_frequency(s), 80);
      for (double delta : {0.2, 0.05})
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
          RandomModeSpec spec;
          spec.seed = seed;
          spec.rho = 1.0;
          auto r = check_thm1(random_decaying_modes(spec), cf, 1.0, delta);
          ++runs;
          if (r.computed > 0) min_ratio = std::min(min_ratio, r.bound / r.computed);
          o.require(r.verdict, std::string(s) + fmt(" delta=%.2f", delta) + " seed " + std::to_string(seed));
        }
    }
    o.detail = std::to_string(runs) + " runs, min bound/computed " + fmt("%.4g", min_ratio);
    return o;
  });

  criterion(8, "counterexample behavior", 0.0, [] {
    Outcome o;
    const double rho = 1.0, Dp = 0.1;
    auto el = expand(parse_frequency("rule:exp-liouville(c=0.5)"), 12);
    auto w = blowup_witness(el, rho, Dp / (1 + omega_estimate(el)), 1.0, el.depth());
    o.require(w.size() >= 4, "witness length");
    // entries start at n = 1
    for (std::size_t i = 1; i + 1 < w.size(); ++i)
      o.require(w[i].log_w_hi < w[i + 1].log_w_lo, "exp-liouville increase at n = " + std::to_string(w[i + 1].n));
    for (std::size_t i = 1; i + 2 < w.size(); ++i)
      o.require(w[i + 2].log_w_lo - w[i + 1].log_w_hi > w[i + 1].log_w_lo - w[i].log_w_hi,
                "exp-liouville increment growth at n = " + std::to_string(w[i + 2].n));
    for (const auto& e : w) o.require(e.identity_ok, "witness identity at n = " + std::to_string(e.n));

    auto g = expand(FrequencySpec::golden(), 80);
    auto gw = blowup_witness(g, rho, Dp / (1 + omega_estimate(g)), 1.0, 30);
    for (std::size_t i = 1; i + 1 < gw.size(); ++i)
      o.require(gw[i + 1].log_w_direct < gw[i].log_w_direct, "golden decrease at n = " + std::to_string(gw[i + 1].n));
    for (std::size_t i = 5; i + 5 < gw.size(); ++i)
      o.require(gw[i + 5].log_w_hi < gw[i].log_w_lo, "golden certified decrease over 5 steps at n = " + std::to_string(gw[i].n));

    auto ar = alpha_normalization(el, el.depth() - 1);
    o.require(ar.holds, "alpha normalization exp-liouville");
    o.require(ar.lower <= ar.two_sum_alpha && ar.two_sum_alpha <= 1.0, "exp-liouville bracket");
    auto ag = alpha_normalization(g, 30);
    o.require(ag.holds, "alpha normalization golden");
    o.detail = "exp-liouville log w_n " + fmt("%.4g", w.size() > 1 ? w[1].log_w_lo : 0.0) + " .. " +
               fmt("%.4g", w.back().log_w_lo) + ", golden log w_30 " + fmt("%.4g", gw.back().log_w_hi) +
               ", 2 sum alpha in [" + fmt("%.6g", ar.lower) + ", 1]";
    return o;
  });

  criterion(9, "integral majorization", 0.0, [] {
    Outcome o;
    std::vector<std::pair<double, double>> rates;
    for (const auto& e : table1()) {
      auto p = KLParams::make(e.T_minus, e.T_plus);
      rates.emplace_back(p.beta, p.beta_prime);
    }
    for (double b : {0.5, 0.9, 1.3})
      for (double bp : {1.4, 2.0, 3.0})
        if (bp > b) rates.emplace_back(b, bp);
    std::size_t checks = 0;
    for (auto [b, bp] : rates)
      for (double D : {0.01, 0.05, 0.2, 1.0})
        for (std::size_t N : {1, 3}) {
          auto r = integral_majorization(b, bp, D, N, 600);
          ++checks;
          o.require(r.holds, fmt("beta=%.4f", b) + fmt(" beta'=%.4f", bp) + fmt(" D=%.2f", D) + " N=" + std::to_string(N));
        }
    o.detail = std::to_string(checks) + " (beta, beta', Delta, N) points";
    return o;
  });

  std::printf("%s: %d criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
