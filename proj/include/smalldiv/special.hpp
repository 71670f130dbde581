#pragma once

namespace smalldiv {

// Euler Gamma on [0.5, 10], relative error well below 1e-9.
double gamma_eul(double x);
double gamma_eul_prime(double x);
double digamma(double x);

// Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt, for a in [0.5, 10], x >= 0.
double upper_incomplete_gamma(double a, double x);

}  // namespace smalldiv
