#include "smalldiv/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "smalldiv/bounds.hpp"
#include "smalldiv/classify.hpp"
#include "smalldiv/cohom.hpp"
#include "smalldiv/frequency_parser.hpp"
#include "smalldiv/partition.hpp"

namespace smalldiv::cli {

using Json = nlohmann::ordered_json;

namespace {

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct HelpRequest : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Output {
  Json params = Json::object();
  Json results = Json::object();
  Json verdicts = Json::object();
  std::string csv;
};

std::string g17(double x) { return fmt::format("{:.17g}", x); }

Json report_json(const BoundReport& r) {
  Json j;
  j["quantity"] = r.quantity;
  j["computed"] = r.computed;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["verdict"] = r.verdict;
  Json p = Json::object();
  for (const auto& [k, v] : r.params) p[k] = v;
  j["params"] = p;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json brj_json(const BrjunoValue& v) {
  Json j;
  j["value"] = v.value;
  j["depth"] = v.depth;
  j["last_term"] = v.last_term;
  j["rounding"] = v.rounding;
  j["dropped"] = v.dropped;
  j["tail_kind"] = v.rigorous() ? "rigorous" : "heuristic";
  j["tail_bound"] = v.tail_bound();
  if (v.rigorous()) j["certificate"] = std::get<RigorousTail>(v.tail).certificate;
  j["upper"] = v.upper();
  return j;
}

std::string truncation_name(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::depth_cap: return "depth_cap";
    case Truncation::bit_cap: return "bit_cap";
    case Truncation::literal_end: return "literal_end";
  }
  return "?";
}

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw InputError(std::string("missing --") + name);
  return *v;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InputError(std::string("--") + name + " must be positive");
}

std::size_t as_size(const std::optional<long>& v, long dflt, const char* name, long min = 0) {
  const long x = v.value_or(dflt);
  if (x < min) throw InputError(std::string("--") + name + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(x);
}

FrequencySpec spec_of(const RunConfig& c) {
  try {
    return parse_frequency(c.freq);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

Json modes_json(const ModeMap& m) {
  Json arr = Json::array();
  for (const auto& [idx, c] : m.entries)
    arr.push_back(Json{{"p", idx.first}, {"q", idx.second}, {"re", c.real()}, {"im", c.imag()}});
  return arr;
}

ModeMap read_modes(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read modes file: " + path);
  Json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw InputError("modes file is not JSON: " + std::string(e.what()));
  }
  if (!j.is_array()) throw InputError("modes file must be a JSON array of {p, q, re, im}");
  ModeMap m;
  for (const auto& r : j) {
    try {
      m.set(r.at("p").get<long>(), r.at("q").get<long>(), Complex(r.at("re").get<double>(), r.at("im").get<double>()));
    } catch (const DomainError& e) {
      throw InputError(e.what());
    } catch (const std::exception& e) {
      throw InputError("bad mode record: " + std::string(e.what()));
    }
  }
  m.hermitian = m.symmetric();
  return m;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << body;
}

RandomModeSpec random_spec(const RunConfig& c, std::uint64_t seed) {
  RandomModeSpec s;
  s.modes = as_size(c.count, 50, "count", 1);
  s.max_index = static_cast<long>(as_size(c.max_index, 8, "max-index", 1));
  s.rho = c.rho.value_or(1.0);
  s.seed = seed;
  return s;
}

// ---- commands

Output cmd_classify(const RunConfig& c) {
  const std::size_t depth = as_size(c.depth, 40, "depth", 2);
  const double tau = c.tau.value_or(1.0);
  if (!(tau >= 1.0)) throw InputError("--tau must be >= 1");
  const double tm = c.T_minus.value_or(0.1), tp = c.T_plus.value_or(0.1);
  const std::size_t N = as_size(c.N, 1, "N", 1);
  const KLParams kp = KLParams::make(tm, tp, N);
  const ContinuedFraction cf = expand(spec_of(c), depth + 2);
  const std::size_t d = std::min(depth, cf.depth() - 1);
  if (d < N) throw InputError("expansion too short for --N");

  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"depth", depth}, {"tau", tau}, {"T_minus", tm}, {"T_plus", tp}, {"N", N}};
  const Interval w = omega_interval(cf);
  o.results["omega"] = {{"lo", w.lo}, {"hi", w.hi}, {"estimate", omega_estimate(cf)}};
  o.results["expanded_depth"] = cf.depth();
  o.results["truncation"] = truncation_name(cf.truncation());
  Json qs = Json::array();
  for (std::size_t n = 1; n <= std::min<std::size_t>(cf.depth(), 20); ++n) qs.push_back(cf.a(n).get_str());
  o.results["quotients_head"] = qs;

  const DiophantineCert dc = diophantine_constant(cf, tau, d);
  o.results["diophantine"] = {{"tau", tau},
                              {"C_empirical_lo", dc.C_empirical.lo},
                              {"C_empirical_hi", dc.C_empirical.hi},
                              {"argmin_n", dc.argmin_n},
                              {"C_recursive", dc.C_recursive},
                              {"C_certified", dc.C_certified},
                              {"label", dc.label()}};
  const BrjunoPartial bp = brjuno_partial_sum(cf, d);
  o.results["brjuno_partial"] = {{"value", bp.value}, {"last_term", bp.last_term}, {"depth", bp.depth}};
  const KLVerdicts kv = kl_membership(cf, kp, d);
  o.results["kl"] = {{"beta", kp.beta},
                     {"beta_prime", kp.beta_prime},
                     {"gamma", kp.gamma},
                     {"upper_KL_prime", kv.upper_KL_prime},
                     {"lower_KL", kv.lower_KL},
                     {"KLBrj", kv.KLBrj},
                     {"first_lower_failure", kv.first_lower_failure},
                     {"first_upper_failure", kv.first_upper_failure}};
  const auto checks = verify_nint_lemma(cf, std::min<std::size_t>(20, cf.depth() - 1));
  std::size_t fails = 0, degenerate = 0;
  for (const auto& ch : checks) {
    fails += ch.verdict == NintVerdict::fails;
    degenerate += ch.verdict == NintVerdict::degenerate;
  }
  o.results["nint_lemma"] = {{"checked", checks.size()}, {"fails", fails}, {"degenerate", degenerate}};
  o.verdicts["nint_lemma"] = fails == 0;
  return o;
}

std::optional<GrowthCertificate> cert_of(const RunConfig& c, const ContinuedFraction& cf) {
  if (c.C || c.tau) {
    const double C = need(c.C, "C"), tau = need(c.tau, "tau");
    if (!(C > 0.0 && C <= 1.0) || !(tau >= 1.0)) throw InputError("need 0 < C <= 1 and tau >= 1");
    return DiophantineGrowth{C, tau};
  }
  if (c.beta || c.beta_prime) {
    const double b = need(c.beta, "beta"), bp = need(c.beta_prime, "beta-prime");
    if (!(b > 0.0 && bp >= b)) throw InputError("need 0 < beta <= beta-prime");
    return KLGrowth{b, bp};
  }
  return rule_growth_certificate(cf);
}

Output cmd_brj(const RunConfig& c) {
  const double Delta = need(c.Delta, "Delta");
  require_positive(Delta, "Delta");
  const std::size_t depth = as_size(c.depth, 40, "depth");
  const ContinuedFraction cf = expand(spec_of(c), depth + 1);
  const std::size_t d = std::min(depth, cf.depth() - 1);
  const auto cert = cert_of(c, cf);
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"Delta", Delta}, {"depth", d}};
  o.results["brj1"] = brj_json(brj1(cf, Delta, d, cert));
  o.results["brj2"] = brj_json(brj2(cf, Delta, d, cert));
  o.results["brj"] = brj_json(brj_combined(cf, Delta, d, cert));
  return o;
}

Output cmd_gamma(const RunConfig& c) {
  const double rho = c.rho.value_or(1.0), delta = need(c.delta, "delta"), mu = c.mu.value_or(1.25);
  require_positive(rho, "rho");
  if (!(delta > 0.0 && delta < rho)) throw InputError("--delta must lie in (0, rho)");
  if (!(delta < std::exp(-1.0))) throw InputError("--delta must be below 1/e");
  const std::size_t depth = as_size(c.depth, 60, "depth");
  const ContinuedFraction cf = expand(spec_of(c), depth + 1);
  const GammaDelta g = gamma_delta(cf, rho, delta, std::min(depth, cf.depth() - 1), mu);
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"rho", rho}, {"delta", delta}, {"mu", mu}, {"depth", depth}};
  o.results = {{"Gamma0", g.Gamma0},
               {"brj_component", g.brj_component},
               {"const_type_component", g.const_type_component},
               {"away_component", g.away_component},
               {"Delta", g.Delta},
               {"omega_lo", g.omega.lo},
               {"omega_hi", g.omega.hi},
               {"G_const_type", g.G_const_type},
               {"G_away", g.G_away},
               {"brj", brj_json(g.brj)},
               {"mu_Gamma0", mu * g.Gamma0}};
  return o;
}

Output cmd_table1(const RunConfig&) {
  Output o;
  Json rows = Json::array();
  for (const auto& e : table1()) {
    rows.push_back({{"T_minus", e.T_minus},
                    {"T_plus", e.T_plus},
                    {"G_KLB1", e.G.G_KLB1},
                    {"G_KLB21", e.G.G_KLB21},
                    {"G_KLB22", e.G.G_KLB22},
                    {"G_KLB22_stated", e.G.G_KLB22_stated},
                    {"display", {format_two_digits(e.G.G_KLB1), format_two_digits(e.G.G_KLB21),
                                 format_two_digits(e.G.G_KLB22)}}});
  }
  o.results["table"] = rows;
  o.csv = table1_csv();
  return o;
}

Output cmd_constants(const RunConfig& c) {
  const double tol = c.tol.value_or(1e-10);
  if (!(tol >= 1e-10)) throw InputError("--tol must be >= 1e-10");
  KhintchineConstants k;
  bool cached = false;
  if (!c.cache_path.empty()) {
    if (auto hit = load_constants_cache(c.cache_path, tol)) {
      k = *hit;
      cached = true;
    }
  }
  if (!cached) {
    k = khintchine_constants(tol);
    if (!c.cache_path.empty()) save_constants_cache(c.cache_path, k);
  }
  const LevyExample l = levy_example_bound();
  Output o;
  o.params = {{"tol", tol}};
  o.results = {{"kappa", k.kappa},
               {"kappa_prime", k.kappa_prime},
               {"ratio", k.kappa_prime / k.kappa},
               {"T_minus_max", k.kappa - kLogPhi},
               {"ell", l.ell},
               {"G_Example", l.G_example},
               {"error_bound", k.tail_bound},
               {"cached", cached}};
  return o;
}

std::size_t partition_depth(const RunConfig& c) { return as_size(c.depth, 80, "depth", 2); }

Output cmd_partition(const RunConfig& c) {
  const double delta = need(c.delta, "delta"), mu = c.mu.value_or(1.25);
  require_positive(delta, "delta");
  const long Q = static_cast<long>(as_size(c.Q, 200, "Q", 1));
  const ContinuedFraction cf = expand(spec_of(c), partition_depth(c));
  const PartitionSums s = partition_sums(cf, delta, Q);
  const double bf = brute_force_box_sum(cf, delta, Q);
  const double rel = std::fabs(s.total - bf) / bf;
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"delta", delta}, {"Q", Q}, {"mu", mu}};
  o.results = {{"away", s.away},
               {"const_type", s.const_type},
               {"brjuno", s.brjuno},
               {"brjuno_k0", s.brjuno_k0},
               {"total", s.total},
               {"brute_force_total", bf},
               {"relative_difference", rel},
               {"counts",
                {{"away", s.counts.away},
                 {"const_type", s.counts.const_type},
                 {"brjuno_pos", s.counts.brjuno_pos},
                 {"brjuno_neg", s.counts.brjuno_neg},
                 {"brjuno_k0", s.counts.brjuno_k0},
                 {"total", s.counts.total()}}},
               {"crit_majorant", s.crit_majorant},
               {"away_tail_bound", s.away_tail_bound}};
  const std::size_t box = static_cast<std::size_t>((2 * Q + 1) * (2 * Q + 1) - 1);
  o.verdicts["oracle_match"] = rel <= 1e-12;
  o.verdicts["counts_tile"] = s.counts.total() == box;
  if (std::log(1.0 / delta) > 1.0) {
    const std::size_t bd = std::min<std::size_t>(cf.depth() - 1, 60);
    const BoundReport r[] = {away_bound_check(cf, s, mu), const_type_bound_check(cf, s, mu),
                             brjuno_bound_check(cf, s, bd, false, mu), brjuno_bound_check(cf, s, bd, true, mu)};
    Json checks = Json::array();
    for (const auto& b : r) {
      checks.push_back(report_json(b));
      o.verdicts[b.quantity] = b.verdict;
    }
    o.results["bound_checks"] = checks;
  }
  if (!c.dump_path.empty()) {
    std::ofstream os(c.dump_path);
    if (!os) throw InputError("cannot write " + c.dump_path);
    write_partition_csv(os, cf, delta, Q);
  }
  return o;
}

Output cmd_legendre(const RunConfig& c) {
  const long Q = static_cast<long>(as_size(c.Q, 10000, "Q", 1));
  const ContinuedFraction cf = expand(spec_of(c), partition_depth(c));
  const BoundReport r = verify_legendre(cf, Q);
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"Q", Q}};
  o.results = report_json(r);
  o.verdicts["legendre"] = r.verdict;
  return o;
}

ModeMap input_modes(const RunConfig& c, std::uint64_t seed) {
  if (!c.modes_path.empty()) return read_modes(c.modes_path);
  return random_decaying_modes(random_spec(c, seed));
}

Output cmd_solve(const RunConfig& c) {
  const double rho = c.rho.value_or(1.0), delta = c.delta.value_or(0.2);
  require_positive(rho, "rho");
  if (!(delta > 0.0 && delta < rho)) throw InputError("--delta must lie in (0, rho)");
  const int grid = static_cast<int>(as_size(c.grid, 64, "grid", 8));
  const std::uint64_t seed = as_size(c.seed, 1, "seed");
  const ModeMap a = input_modes(c, seed);
  const ContinuedFraction cf = expand(spec_of(c), partition_depth(c));
  const SolvedModes g = solve_modes(a, cf);
  double worst = 0.0;
  bool ok = true;
  for (const auto& [idx, ac] : a.entries) {
    const DivisorEstimate d = small_divisor(cf, BigInt(idx.second), BigInt(idx.first));
    const Complex back = Complex(0.0, -1.0) * g.g.entries.at(idx) * d.value;
    const double err = std::abs(back - ac);
    const double allowed = (g.rel_error.at(idx) + 4.0 * kUlp) * std::abs(ac);
    worst = std::max(worst, std::abs(ac) > 0 ? err / std::abs(ac) : 0.0);
    ok = ok && err <= allowed;
  }
  const StripNormEstimate na = strip_norm(a, rho, grid);
  const StripNormEstimate ng = strip_norm(g.g, rho - delta, grid);
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"rho", rho}, {"delta", delta}, {"grid", grid}, {"modes", a.size()}};
  if (c.modes_path.empty()) o.params["seed"] = seed;
  o.results = {{"a_norm", {{"R", na.R}, {"upper", na.upper}, {"sampled_lower", na.sampled_lower}}},
               {"g_norm", {{"R", ng.R}, {"upper", ng.upper}, {"sampled_lower", ng.sampled_lower}}},
               {"hermitian", g.g.hermitian},
               {"round_trip_max_rel_error", worst}};
  o.verdicts["round_trip"] = ok;
  o.verdicts["sampled_le_upper"] = na.sampled_lower <= na.upper * (1 + 1e-12) && ng.sampled_lower <= ng.upper * (1 + 1e-12);
  if (!c.dump_path.empty()) write_text(c.dump_path, modes_json(g.g).dump(1) + "\n");
  return o;
}

Output cmd_thm1(const RunConfig& c) {
  const double rho = c.rho.value_or(1.0), delta = need(c.delta, "delta"), mu = c.mu.value_or(1.25);
  require_positive(rho, "rho");
  if (!(delta > 0.0 && delta < rho)) throw InputError("--delta must lie in (0, rho)");
  if (!(delta < std::exp(-1.0))) throw InputError("--delta must be below 1/e");
  const std::size_t trials = c.modes_path.empty() ? as_size(c.trials, 1, "trials", 1) : 1;
  const std::uint64_t seed = as_size(c.seed, 1, "seed");
  const std::size_t depth = as_size(c.depth, 60, "depth");
  const int grid = static_cast<int>(as_size(c.grid, 64, "grid", 8));
  const ContinuedFraction cf = expand(spec_of(c), std::max<std::size_t>(depth + 1, partition_depth(c)));
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"rho", rho}, {"delta", delta}, {"mu", mu}, {"trials", trials}, {"depth", depth}};
  Json rows = Json::array();
  bool all = true;
  double min_margin = INFINITY;
  for (std::size_t t = 0; t < trials; ++t) {
    const ModeMap a = input_modes(c, seed + t);
    const BoundReport r = check_thm1(a, cf, rho, delta, mu, std::min(depth, cf.depth() - 1), grid);
    Json j = report_json(r);
    if (c.modes_path.empty()) j["seed"] = seed + t;
    rows.push_back(j);
    all = all && r.verdict;
    min_margin = std::min(min_margin, r.margin);
  }
  o.results["checks"] = rows;
  o.results["min_margin"] = min_margin;
  o.verdicts["thm1"] = all;
  return o;
}

Output cmd_counterexample(const RunConfig& c) {
  const double rho = c.rho.value_or(1.0), eps = c.epsilon.value_or(1.0);
  require_positive(rho, "rho");
  require_positive(eps, "epsilon");
  const std::size_t want = as_size(c.n_max, 10, "n-max", 1);
  const ContinuedFraction cf = expand(spec_of(c), want + 2);
  const std::size_t avail = cf.next_log_quotient() ? cf.depth() : cf.depth() - 2;
  if (c.n_max && want > avail) throw InputError("--n-max beyond the available expansion (" + std::to_string(avail) + ")");
  const std::size_t n_max = std::min(want, avail);
  const double w = omega_estimate(cf);
  double dp;
  if (c.delta_prime)
    dp = *c.delta_prime;
  else
    dp = c.Delta.value_or(0.1) / (1.0 + w);
  if (!(dp > 0.0 && dp < rho)) throw InputError("need 0 < delta' < rho");

  const AlphaReport ar = alpha_normalization(cf, n_max);
  const auto wit = blowup_witness(cf, rho, dp, eps, n_max);
  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"rho", rho}, {"epsilon", eps}, {"n_max", n_max},
              {"delta_prime", dp}, {"Delta_prime", (1.0 + w) * dp}};
  o.results["alpha"] = {{"alpha_bar_trunc", ar.alpha_bar_trunc}, {"tail", ar.tail},
                        {"alpha_bar_hi", ar.alpha_bar_hi},       {"two_sum_alpha", ar.two_sum_alpha},
                        {"lower", ar.lower},                     {"tail_from_log", ar.tail_from_log}};
  Json wj = Json::array();
  bool identity = true, increasing = true, accel = true;
  std::ostringstream csv;
  csv << "n,p_n,q_n,log_w_lo,log_w_hi\n";
  for (std::size_t i = 0; i < wit.size(); ++i) {
    const auto& e = wit[i];
    wj.push_back({{"n", e.n}, {"p_n", e.p.get_str()}, {"q_n", e.q.get_str()}, {"log_w_lo", e.log_w_lo}, {"log_w_hi", e.log_w_hi}});
    csv << e.n << ',' << e.p.get_str() << ',' << e.q.get_str() << ',' << g17(e.log_w_lo) << ',' << g17(e.log_w_hi) << '\n';
    identity = identity && e.identity_ok;
    // from n = 2: certified strict increase uses hi(n) < lo(n+1)
    if (e.n >= 2 && i + 1 < wit.size() && !(e.log_w_hi < wit[i + 1].log_w_lo)) increasing = false;
    if (e.n >= 2 && i + 2 < wit.size()) {
      const double d1 = wit[i + 1].log_w_lo - e.log_w_hi;
      const double d2 = wit[i + 2].log_w_lo - wit[i + 1].log_w_hi;
      if (!(d2 > d1)) accel = false;
    }
  }
  o.results["witness"] = wj;
  o.results["witness_increasing_from_2"] = increasing;
  o.results["increments_increasing"] = accel;
  Json dj = Json::array();
  for (const auto& d : divergence_diagnostic(cf, (1.0 + w) * dp))
    dj.push_back({{"n", d.n}, {"log_lhs", d.log_lhs}, {"log_rhs", d.log_rhs}, {"holds", d.holds}});
  o.results["divergence_diagnostic"] = dj;
  bool fits = true;
  for (std::size_t n = 1; n <= n_max; ++n) fits = fits && cf.p(n).fits_slong_p() && cf.q(n).fits_slong_p();
  if (fits) {
    const Counterexample ce = counterexample_modes(cf, rho, eps, n_max);
    o.results["norm_upper"] = ce.norm_upper;
    o.verdicts["norm_leq_epsilon"] = ce.norm_upper <= eps * (1.0 + 16.0 * static_cast<double>(n_max) * kUlp);
    if (!c.dump_path.empty()) write_text(c.dump_path, modes_json(ce.modes).dump(1) + "\n");
  }
  o.verdicts["alpha_normalization"] = ar.holds;
  o.verdicts["witness_identity"] = identity;
  o.csv = csv.str();
  return o;
}

std::vector<double> log_grid(double lo, double hi, std::size_t steps) {
  if (!(lo > 0.0 && hi >= lo)) throw InputError("need 0 < delta-min <= delta-max");
  std::vector<double> g;
  if (steps == 1) return {lo};
  for (std::size_t i = 0; i < steps; ++i)
    g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(steps - 1)));
  return g;
}

Output cmd_sweep(const RunConfig& c) {
  static const std::vector<std::string> checks = {"away", "const_type", "brjuno", "brjuno_k_ge_1", "thm1",
                                                  "thm2_brj1", "thm2_brj2", "thm3_brj1", "thm3_brj2"};
  if (std::find(checks.begin(), checks.end(), c.check) == checks.end())
    throw InputError("--check must be one of away, const_type, brjuno, brjuno_k_ge_1, thm1, thm2_brj1, thm2_brj2, thm3_brj1, thm3_brj2");
  const std::size_t steps = as_size(c.steps, 8, "steps", 1);
  const double lo = need(c.delta_min, "delta-min"), hi = need(c.delta_max, "delta-max");
  const auto grid = log_grid(lo, hi, steps);
  const double mu = c.mu.value_or(1.25);
  const std::size_t depth = as_size(c.depth, 60, "depth");
  const long Q = static_cast<long>(as_size(c.Q, 200, "Q", 1));
  const ContinuedFraction cf = expand(spec_of(c), std::max<std::size_t>(depth + 1, partition_depth(c)));
  const std::size_t d = std::min(depth, cf.depth() - 1);

  std::optional<DiophantineGrowth> dg;
  std::optional<KLParams> kp;
  if (c.check.rfind("thm2", 0) == 0) {
    auto cert = cert_of(c, cf);
    if (!cert || !std::holds_alternative<DiophantineGrowth>(*cert))
      throw InputError("thm2 sweep needs --C and --tau or a bounded-quotient frequency");
    dg = std::get<DiophantineGrowth>(*cert);
  }
  if (c.check.rfind("thm3", 0) == 0) kp = KLParams::make(c.T_minus.value_or(0.1), c.T_plus.value_or(0.1), as_size(c.N, 1, "N", 1));

  Output o;
  o.params = {{"freq", cf.spec().describe()}, {"check", c.check}, {"delta_min", lo}, {"delta_max", hi},
              {"steps", steps}, {"mu", mu}, {"depth", d}, {"Q", Q}};
  std::ostringstream csv;
  csv << "check,x,computed,bound,margin,verdict\n";
  Json rows = Json::array();
  bool all = true;
  for (double x : grid) {
    BoundReport r;
    if (c.check == "thm2_brj1" || c.check == "thm2_brj2") {
      r = dioph_chain_check(cf, *dg, x, d, c.check.back() - '0');
    } else if (c.check == "thm3_brj1" || c.check == "thm3_brj2") {
      r = kl_chain_check(cf, *kp, x, d, c.check.back() - '0');
    } else if (c.check == "thm1") {
      r = check_thm1(random_decaying_modes(random_spec(c, as_size(c.seed, 1, "seed"))), cf, c.rho.value_or(1.0), x, mu, d);
    } else {
      const PartitionSums s = partition_sums(cf, x, Q);
      const std::size_t bd = std::min<std::size_t>(cf.depth() - 1, 60);
      if (c.check == "away") r = away_bound_check(cf, s, mu);
      else if (c.check == "const_type") r = const_type_bound_check(cf, s, mu);
      else r = brjuno_bound_check(cf, s, bd, c.check == "brjuno", mu);
    }
    csv << c.check << ',' << g17(x) << ',' << g17(r.computed) << ',' << g17(r.bound) << ',' << g17(r.margin) << ','
        << (r.verdict ? "true" : "false") << '\n';
    Json j = report_json(r);
    j["x"] = x;
    rows.push_back(j);
    all = all && r.verdict;
  }
  o.results["rows"] = rows;
  o.verdicts[c.check] = all;
  o.csv = csv.str();
  return o;
}

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else if (j.is_number_float()) {
    os << prefix << ": " << fmt::format("{:.6g}", j.get<double>()) << '\n';
  } else if (j.is_string()) {
    os << prefix << ": " << j.get<std::string>() << '\n';
  } else {
    os << prefix << ": " << j.dump() << '\n';
  }
}

Output dispatch(const RunConfig& c) {
  if (c.command == "classify") return cmd_classify(c);
  if (c.command == "brj") return cmd_brj(c);
  if (c.command == "gamma") return cmd_gamma(c);
  if (c.command == "table1") return cmd_table1(c);
  if (c.command == "constants") return cmd_constants(c);
  if (c.command == "partition") return cmd_partition(c);
  if (c.command == "legendre") return cmd_legendre(c);
  if (c.command == "solve") return cmd_solve(c);
  if (c.command == "thm1") return cmd_thm1(c);
  if (c.command == "counterexample") return cmd_counterexample(c);
  if (c.command == "sweep") return cmd_sweep(c);
  throw InputError("unknown command '" + c.command + "'");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunConfig c = config;
  if (c.format.empty()) c.format = c.command == "table1" ? "csv" : "json";
  if (c.format != "json" && c.format != "csv" && c.format != "text") {
    err << "error: --format must be json, csv or text\n";
    return kInputError;
  }
  Output o;
  try {
    o = dispatch(c);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DepthExhausted& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  std::ostringstream body;
  if (c.format == "csv") {
    if (o.csv.empty()) {
      err << "error: command '" << c.command << "' has no CSV form\n";
      return kInputError;
    }
    body << o.csv;
  } else {
    Json doc;
    doc["command"] = c.command;
    doc["params"] = o.params;
    doc["results"] = o.results;
    doc["verdicts"] = o.verdicts;
    doc["version"] = kVersion;
    if (c.format == "json")
      body << doc.dump(2) << '\n';
    else
      flatten(doc, "", body);
  }
  if (c.output.empty()) {
    out << body.str();
  } else {
    std::ofstream os(c.output);
    if (!os) {
      err << "error: cannot write " << c.output << '\n';
      return kInputError;
    }
    os << body.str();
  }
  bool ok = true;
  for (const auto& [k, v] : o.verdicts.items()) ok = ok && v.get<bool>();
  return ok ? kOk : kVerdictFailure;
}

RunConfig parse_command_line(const std::vector<std::string>& args) {
  RunConfig c;
  c.format.clear();
  CLI::App app{"small-divisor laboratory"};
  app.add_option("command", c.command,
                 "classify | brj | gamma | table1 | constants | partition | legendre | solve | thm1 | "
                 "counterexample | sweep")
      ->required();
  app.add_option("--freq", c.freq, kFrequencyGrammar);
  app.add_option("--delta", c.delta);
  app.add_option("--Delta", c.Delta);
  app.add_option("--rho", c.rho);
  app.add_option("--epsilon", c.epsilon);
  app.add_option("--tau", c.tau);
  app.add_option("--C", c.C);
  app.add_option("--T-minus", c.T_minus);
  app.add_option("--T-plus", c.T_plus);
  app.add_option("--mu", c.mu);
  app.add_option("--beta", c.beta);
  app.add_option("--beta-prime", c.beta_prime);
  app.add_option("--delta-prime", c.delta_prime);
  app.add_option("--delta-min", c.delta_min);
  app.add_option("--delta-max", c.delta_max);
  app.add_option("--tol", c.tol);
  app.add_option("--N", c.N);
  app.add_option("--Q", c.Q);
  app.add_option("--depth", c.depth);
  app.add_option("--n-max", c.n_max);
  app.add_option("--seed", c.seed);
  app.add_option("--count", c.count, "random ModeMap size");
  app.add_option("--trials", c.trials);
  app.add_option("--max-index", c.max_index);
  app.add_option("--steps", c.steps);
  app.add_option("--grid", c.grid);
  app.add_option("--check", c.check);
  app.add_option("--modes", c.modes_path, "ModeMap JSON [{p,q,re,im}]");
  app.add_option("--dump", c.dump_path);
  app.add_option("--cache", c.cache_path);
  app.add_option("--format", c.format, "json | csv | text");
  app.add_option("--output,-o", c.output);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequest(app.help());
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  return c;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig c;
  try {
    c = parse_command_line(args);
  } catch (const HelpRequest& h) {
    std::cout << h.what();
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  return run(c, std::cout, std::cerr);
}

}  // namespace smalldiv::cli
