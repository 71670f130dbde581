#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "smalldiv/classify.hpp"
#include "smalldiv/frequency_parser.hpp"

#include <cstdio>
#include <filesystem>

using namespace smalldiv;

namespace {

const double kKappaRef = oracle::gauss_log_moment(0);
const double kKappaPrimeRef = oracle::gauss_log_moment(1);

}  // namespace

TEST_CASE("Gauss-measure constants against a direct-summation oracle") {
  const auto& k = universal_constants();
  CHECK(std::fabs(k.kappa - kKappaRef) < 1e-9);
  CHECK(std::fabs(k.kappa_prime - kKappaPrimeRef) < 1e-9);
  CHECK(k.tail_bound <= 1e-10);
  // log of Khinchin's constant 2.685452001065306445...
  CHECK(k.kappa == doctest::Approx(std::log(2.6854520010653064)).epsilon(1e-10));
}

TEST_CASE("quoted approximations") {
  const auto& k = universal_constants();
  CHECK(std::fabs(k.kappa - 0.988) <= 0.001);
  CHECK(std::fabs(std::exp(k.kappa) - 2.685) <= 0.001);
  CHECK(std::fabs(k.kappa_prime - 1.410) <= 0.001);
  // the quoted 1.4278 is what a plain truncated series gives; the true ratio is 1.42713
  CHECK(k.kappa_prime / k.kappa == doctest::Approx(kKappaPrimeRef / kKappaRef).epsilon(1e-9));
  CHECK(std::fabs(k.kappa_prime / k.kappa - 1.42713) <= 1e-5);
  CHECK(std::fabs(T_minus_max() - 0.507) <= 0.001);
  CHECK(T_minus_max() == doctest::Approx(k.kappa - kLogPhi).epsilon(1e-14));
}

TEST_CASE("coarser tolerance still brackets the reference") {
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    auto k = khintchine_constants(tol);
    CHECK(std::fabs(k.kappa - kKappaRef) <= tol);
    CHECK(std::fabs(k.kappa_prime - kKappaPrimeRef) <= tol);
  }
  CHECK_THROWS_AS(khintchine_constants(1e-12), DomainError);
}

TEST_CASE("constants cache round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "smalldiv_constants_test.txt").string();
  save_constants_cache(path, universal_constants());
  auto hit = load_constants_cache(path, 1e-10);
  REQUIRE(hit.has_value());
  CHECK(hit->kappa == universal_constants().kappa);
  CHECK(hit->kappa_prime == universal_constants().kappa_prime);
  // a cache made at a coarser tolerance does not serve a finer request
  save_constants_cache(path, khintchine_constants(1e-6));
  CHECK_FALSE(load_constants_cache(path, 1e-10).has_value());
  std::remove(path.c_str());
  CHECK_FALSE(load_constants_cache(path, 1e-10).has_value());
}

TEST_CASE("golden Diophantine constant") {
  auto cf = expand(FrequencySpec::golden(), 20);
  auto dc = diophantine_constant(cf, 1.0, 15);
  // brute force over 0 < q <= 1000 with p = nint(q omega)
  const oracle::Real w = oracle::golden();
  double best = 1e300;
  long arg = 0;
  for (long q = 1; q <= 1000; ++q) {
    oracle::Real qw = oracle::Real(static_cast<double>(q)) * w;
    mpz_class p;
    mpfr_get_z(p.get_mpz_t(), qw.get(), MPFR_RNDN);
    const double v = q * std::fabs(oracle::linear(w, q, p.get_si()));
    if (v < best) best = v, arg = q;
  }
  CHECK(arg == 1);
  CHECK(best == doctest::Approx(0.381966).epsilon(1e-5));
  CHECK(dc.C_empirical.lo <= best * (1 + 1e-12));
  CHECK(dc.C_empirical.hi >= best * (1 - 1e-12));
  CHECK(cf.q(dc.argmin_n) == 1);
  CHECK(dc.C_certified == doctest::Approx(dc.C_recursive / (2 + dc.C_recursive)));
  CHECK(dc.rule_level);
  CHECK(dc.label() == "certificate");
}

TEST_CASE("recursive constant scan") {
  // largest C with q_{n+1} <= q_n^tau / C and a_{n+1} <= q_n^(tau-1) / C, over n <= depth
  for (const char* s : {"golden", "surd:[;2]", "surd:[;1,40]"}) {
    auto cf = expand(parse_frequency(s), 30);
    for (double tau : {1.0, 1.5, 2.0}) {
      auto dc = diophantine_constant(cf, tau, 20);
      double c = 1e300;
      for (std::size_t n = 1; n <= 20; ++n) {
        const double qn = cf.q(n).get_d();
        c = std::min(c, std::pow(qn, tau) / cf.q(n + 1).get_d());
        c = std::min(c, std::pow(qn, tau - 1) / cf.a(n + 1).get_d());
      }
      CHECK(dc.C_recursive <= c * (1 + 1e-12));
      CHECK(dc.C_recursive > 0);
    }
  }
  CHECK(certified_from_recursive(1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("non-periodic specs are diagnostics") {
  auto cf = expand(parse_frequency("rule:omega-star(alpha=1/n^1,a1=2)"), 8);
  auto dc = diophantine_constant(cf, 1.0, 6);
  CHECK(dc.label() == "diagnostic");
  CHECK_THROWS_AS(diophantine_constant(cf, 0.5, 6), DomainError);
}

TEST_CASE("Brjuno partial sums") {
  auto cf = expand(FrequencySpec::golden(), 20);
  auto bp = brjuno_partial_sum(cf, 10);
  oracle::Real s;
  std::vector<mpz_class> a(12, 1), p, q;
  oracle::convergents(a, p, q);
  for (std::size_t n = 1; n <= 10; ++n) s = s + oracle::log(oracle::Real(q[n + 1])) / oracle::Real(q[n]);
  CHECK(bp.value == doctest::Approx(s.d()).epsilon(1e-14));
  CHECK(bp.value == doctest::Approx(3.17).epsilon(0.005));

  auto one = expand(parse_frequency("quotients:[1]"), 1);
  CHECK(brjuno_partial_sum(one, 1).value == 0.0);
  auto two = expand(parse_frequency("quotients:[1,1]"), 2);
  CHECK(brjuno_partial_sum(two, 1).value == doctest::Approx(std::log(2.0)));

  // omega-star: partial sums keep growing
  auto os = expand(parse_frequency("rule:omega-star(alpha=1/n^1,a1=2)"), 8);
  double prev = 0.0;
  for (std::size_t d = 1; d + 1 <= std::min<std::size_t>(os.depth(), 7); ++d) {
    auto v = brjuno_partial_sum(os, d);
    CHECK(v.value > prev);
    CHECK(v.last_term > 0.0);
    prev = v.value;
  }
}

TEST_CASE("KL membership") {
  auto golden = expand(FrequencySpec::golden(), 25);
  for (double t : {0.05, 0.3, 0.5}) {
    auto v = kl_membership(golden, KLParams::make(t, t, 1), 20);
    CHECK_FALSE(v.lower_KL);
    CHECK(v.upper_KL_prime);
    CHECK_FALSE(v.KLBrj);
  }
  auto s2 = expand(parse_frequency("surd:[;2]"), 25);
  const double edge = universal_constants().kappa - std::log(2.0);
  CHECK(edge == doctest::Approx(0.295).epsilon(0.002));
  CHECK_FALSE(kl_membership(s2, KLParams::make(edge - 0.005, 0.1, 1), 20).lower_KL);
  CHECK(kl_membership(s2, KLParams::make(edge + 0.005, 0.1, 1), 20).lower_KL);
  CHECK(kl_membership(s2, KLParams::make(0.3, 0.0, 1), 20).KLBrj);
  auto s3 = expand(parse_frequency("surd:[;3]"), 25);
  CHECK(kl_membership(s3, KLParams::make(0.0, 0.0, 1), 20).KLBrj);
}

TEST_CASE("KL parameter validation") {
  CHECK_THROWS_AS(KLParams::make(0.6, 0.1), DomainError);
  CHECK_THROWS_AS(KLParams::make(-0.1, 0.1), DomainError);
  CHECK_THROWS_AS(KLParams::make(0.1, 0.1, 0), DomainError);
  auto p = KLParams::make(0.1, 0.2);
  const auto& k = universal_constants();
  CHECK(p.beta == doctest::Approx(k.kappa - 0.1));
  CHECK(p.beta_prime == doctest::Approx(k.kappa_prime + 0.2));
  CHECK(p.gamma == doctest::Approx(p.beta_prime / p.beta));
}

TEST_CASE("Levy example") {
  auto l = levy_example_bound();
  CHECK(l.ell == doctest::Approx(M_PI * M_PI / (12 * std::log(2.0))).epsilon(1e-14));
  CHECK(std::fabs(l.ell - 1.1866) <= 1e-4);
  CHECK(std::fabs(l.G_example - 3.9658) <= 1e-3);
  CHECK(std::exp(-1.0) + 1.0 / l.ell > 1.0);
}
