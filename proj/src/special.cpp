#include "smalldiv/special.hpp"

#include <cmath>
#include <numbers>

#include "smalldiv/numeric.hpp"

namespace smalldiv {

namespace {

void check_domain(double x, const char* what) {
  if (!(x >= 0.5 && x <= 10.0))
    throw DomainError(std::string(what) + ": argument outside [0.5, 10]");
}

// Lanczos, g = 7, n = 9
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double gamma_eul(double x) {
  check_domain(x, "gamma_eul");
  const double z = x - 1.0;
  double s = kLanczos[0];
  for (int i = 1; i < 9; ++i) s += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * s;
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
  double shift = 0.0;
  while (x < 12.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli tail: B_{2k} / (2k x^{2k})
  const double series =
      inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double gamma_eul_prime(double x) {
  check_domain(x, "gamma_eul_prime");
  return gamma_eul(x) * digamma(x);
}

double upper_incomplete_gamma(double a, double x) {
  check_domain(a, "upper_incomplete_gamma");
  if (x < 0.0) throw DomainError("upper_incomplete_gamma: x must be >= 0");
  const double g = gamma_eul(a);
  if (x == 0.0) return g;
  const double log_prefix = a * std::log(x) - x;
  if (x < a + 1.0) {
    // lower series: gamma(a, x) = x^a e^-x sum x^n / (a (a+1) ... (a+n))
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return g - std::exp(log_prefix) * sum;
  }
  // modified Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefix) * h;
}

}  // namespace smalldiv
