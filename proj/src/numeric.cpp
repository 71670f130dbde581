#include "smalldiv/numeric.hpp"

#include <cstdint>
#include <numbers>

namespace smalldiv {

long double to_long_double(const BigInt& x) {
  if (x == 0) return 0.0L;
  const std::size_t bits = bit_length(x);
  mpz_class a = abs(x);
  long shift = 0;
  if (bits > 64) {
    shift = static_cast<long>(bits - 64);
    mpz_tdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  }
  // a < 2^64 now; split into two 32-bit halves to stay portable
  mpz_class hi_part = a >> 32;
  mpz_class lo_part = a - (hi_part << 32);
  const long double v = static_cast<long double>(hi_part.get_ui()) * 4294967296.0L +
                        static_cast<long double>(lo_part.get_ui());
  const long double r = std::ldexp(v, static_cast<int>(shift > 100000 ? 100000 : shift));
  return x < 0 ? -r : r;
}

double log_abs(const BigInt& x) {
  if (x == 0) throw DomainError("log of zero");
  long e = 0;
  const double d = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log(std::fabs(d)) + static_cast<double>(e) * std::numbers::ln2;
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("division by zero");
  if (num == 0) return 0.0;
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
  const double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
  const long e = en - ed;
  if (e > 2000) return (mn / md) > 0 ? INFINITY : -INFINITY;
  if (e < -2000) return 0.0;
  return std::ldexp(mn / md, static_cast<int>(e));
}

std::string to_string(const BigInt& x) { return x.get_str(); }

}  // namespace smalldiv
