#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace smalldiv {

using BigInt = mpz_class;
using Rational = mpq_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments or a precondition violated by the caller.
struct DomainError : Error {
  using Error::Error;
};

// A comparison against omega needed more quotients than were expanded.
struct DepthExhausted : Error {
  using Error::Error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Top 64 bits of |x| as a long double, scaled back; exact below 2^64.
long double to_long_double(const BigInt& x);

// Natural log of |x|, x != 0, valid far beyond the double range.
double log_abs(const BigInt& x);

// num/den rounded to double; inf when out of range.
double ratio_to_double(const BigInt& num, const BigInt& den);

inline std::size_t bit_length(const BigInt& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

// Neumaier variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline constexpr double kPhi = 1.6180339887498948482;
inline constexpr double kLogPhi = 0.48121182505960344750;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kUlp = std::numeric_limits<double>::epsilon();

// exp(x) rounded, 0 below the subnormal range.
inline double exp_or_zero(double x) { return x < -745.2 ? 0.0 : std::exp(x); }

std::string to_string(const BigInt& x);

}  // namespace smalldiv
