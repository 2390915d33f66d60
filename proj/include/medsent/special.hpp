#pragma once

#include <cstddef>

namespace medsent {

// log of Binomial(n, p) pmf at k.
double log_binomial_pmf(std::size_t k, std::size_t n, double p);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
// by series for x < a + 1 and by continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double df);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double regularized_beta(double a, double b, double x);

// x with I_x(a, b) = target, by bisection to full double resolution.
double inverse_regularized_beta(double a, double b, double target);

}  // namespace medsent
