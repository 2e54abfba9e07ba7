#pragma once

#include "qsfl/errors.hpp"

namespace qsfl::special {

inline constexpr double euler_gamma = 0.57721566490153286;

struct SpecialFnConfig {
  double rel_tol = 1e-12;
  int max_iter = 500;
};

// Generalized exponential integral E_p(x) = integral_1^inf exp(-x a) a^(-p) da.
// Domain: p >= 1, x >= 0; (p=1, x=0) diverges and throws DomainError.
// E_p(0) = 1/(p-1). Continued fraction for x >= 1, hybrid power series below.
double exp_int(double p, double x, const SpecialFnConfig& cfg = {});

// Upper incomplete gamma Gamma(t, x) = integral_x^inf a^(t-1) exp(-a) da.
// Domain: t > 0, x >= 0. Gamma(t, 0) is the complete gamma function.
double upper_gamma(double t, double x, const SpecialFnConfig& cfg = {});

// Two-term small-argument approximation E_1(x) ~= -euler_gamma - ln(x).
// Domain: 0 < x <= 0.01 (where the dropped O(x) term is below 0.1% relative).
double exp_int1_small(double x);

// exp(-a) - exp(-b) for 0 <= a <= b (either may be +inf), no cancellation.
double exp_diff(double a, double b);

// E_1(a) - E_1(b) for 0 < a <= b <= +inf, stable when both arguments are tiny
// (the logarithmic parts cancel analytically).
double exp_int1_diff(double a, double b, const SpecialFnConfig& cfg = {});

// Gamma(t, a) - Gamma(t, b) for 0 <= a <= b <= +inf. Uses the lower-gamma
// series termwise when both arguments are small, where the direct difference
// would cancel catastrophically.
double upper_gamma_diff(double t, double a, double b, const SpecialFnConfig& cfg = {});

// E_1(exp(l)) for a log-scale argument; l = +inf maps to 0, and below
// l < -69 the expansion -euler_gamma - l is exact to double precision.
double exp_int1_log(double l, const SpecialFnConfig& cfg = {});

// exp(-exp(l1)) - exp(-exp(l2)) for l1 <= l2, log-scale arguments.
double exp_diff_log(double l1, double l2);

// exp(lC) * (Gamma(t, exp(le1)) - Gamma(t, exp(le2))) for le1 <= le2 and
// t > 0, where lC may be far outside double range as long as the product
// is representable. Termwise scaled series when exp(le2) < 0.9, else direct.
double scaled_upper_gamma_diff(double t, double lC, double le1, double le2,
                               const SpecialFnConfig& cfg = {});

}  // namespace qsfl::special
