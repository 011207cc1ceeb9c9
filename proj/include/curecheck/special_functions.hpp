#pragma once

// Special functions used by the parametric latency families.
//
// log_gamma is a Lanczos approximation (g = 7, 9 terms), good to ~1e-15
// relative for x > 0. It is reentrant, unlike glibc's lgamma which writes
// the global signgam.
//
// The regularized incomplete gamma functions use the power series when
// x < a + 1 and a modified-Lentz continued fraction otherwise, both iterated
// to a relative tolerance well under 1e-12.

namespace curecheck::special {

double log_gamma(double x);

// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// log Q(a, x), accurate when Q underflows (large x).
double log_gamma_q(double a, double x);

// Inverse of P(a, ·): returns x with P(a, x) = p. Bisection bracket refined
// by Newton steps; absolute tolerance 1e-10 in p.
double gamma_p_inverse(double a, double p);

// Standard normal distribution.
double normal_cdf(double z);
double normal_sf(double z);       // 1 - Φ(z), without cancellation
double log_normal_sf(double z);   // log(1 - Φ(z)), finite for large z
double normal_quantile(double p);

// Survival function of χ² with one degree of freedom.
double chisq1_sf(double x);

}  // namespace curecheck::special
