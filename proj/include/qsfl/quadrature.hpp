#pragma once

#include <functional>

#include "qsfl/errors.hpp"

namespace qsfl::quadrature {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_subdivisions = 10000;
};

// Adaptive Gauss-Kronrod (7/15) integration over a finite interval.
// Throws QuadratureFailure when the subdivision budget is exhausted before
// the error estimate drops below abs_tol.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opts = {});

// Integral over [lo, +inf) via the rational map a = lo + u/(1-u), u in (0,1).
// Intended for integrands with exponential tail decay.
double integrate_semi_infinite(const std::function<double(double)>& f, double lo,
                               const QuadratureOptions& opts = {});

}  // namespace qsfl::quadrature
