#include "qsfl/special.hpp"

#include <cmath>
#include <limits>

namespace qsfl::special {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Modified Lentz continued fraction shared by exp_int (x >= 1) and the
// upper-gamma tail. Coefficients differ only in the a_i / b_0 pattern.
double exp_int_cf(double p, double x, const SpecialFnConfig& cfg) {
  double b = x + p;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= cfg.max_iter; ++i) {
    const double a = -i * (p - 1.0 + i);
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    c = b + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < cfg.rel_tol) return h * std::exp(-x);
  }
  throw NonConvergence("exp_int: continued fraction did not converge");
}

// E_p(x) for 0 < x < 1 by the power series around x = 0. Written so the
// k-th term (x^(p-1) - x^k)/eps_k is evaluated without cancellation even
// when eps_k = k+1-p is tiny or exactly zero (integer p).
double exp_int_series(double p, double x, const SpecialFnConfig& cfg) {
  const double lx = std::log(x);
  double acc = std::pow(x, p - 1.0) * exp_int_cf(p, 1.0, cfg);
  double inv_kfac = 1.0;  // (-1)^k / k!
  int calm = 0;
  for (int k = 0; k <= cfg.max_iter; ++k) {
    if (k > 0) inv_kfac *= -1.0 / k;
    const double eps = k + 1.0 - p;
    double term;
    if (eps == 0.0) {
      term = -inv_kfac * std::pow(x, static_cast<double>(k)) * lx;
    } else if (std::abs(eps * lx) <= 0.5) {
      term = inv_kfac * std::pow(x, static_cast<double>(k)) * std::expm1(-eps * lx) / eps;
    } else {
      term = inv_kfac * (std::pow(x, p - 1.0) - std::pow(x, static_cast<double>(k))) / eps;
    }
    acc += term;
    if (std::abs(term) <= cfg.rel_tol * std::abs(acc) && k >= 2) {
      if (++calm >= 2) return acc;
    } else {
      calm = 0;
    }
  }
  throw NonConvergence("exp_int: small-argument series did not converge");
}

// Regularized-free lower gamma series, valid for x < t + 1.
double lower_gamma_series(double t, double x, const SpecialFnConfig& cfg) {
  double term = 1.0 / t;
  double sum = term;
  for (int n = 1; n <= cfg.max_iter; ++n) {
    term *= x / (t + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * cfg.rel_tol)
      return sum * std::exp(t * std::log(x) - x);
  }
  throw NonConvergence("upper_gamma: lower series did not converge");
}

double upper_gamma_cf(double t, double x, const SpecialFnConfig& cfg) {
  double b = x + 1.0 - t;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= cfg.max_iter; ++i) {
    const double a = -i * (i - t);
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    c = b + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < cfg.rel_tol)
      return h * std::exp(t * std::log(x) - x);
  }
  throw NonConvergence("upper_gamma: continued fraction did not converge");
}

}  // namespace

double exp_int(double p, double x, const SpecialFnConfig& cfg) {
  if (!(p >= 1.0) || !(x >= 0.0))
    throw DomainError("exp_int: requires p >= 1 and x >= 0");
  if (x == 0.0) {
    if (p == 1.0) throw DomainError("exp_int: E_1(0) diverges");
    return 1.0 / (p - 1.0);
  }
  if (std::isinf(x) || x > 700.0) return 0.0;
  if (x >= 1.0) return exp_int_cf(p, x, cfg);
  return exp_int_series(p, x, cfg);
}

double upper_gamma(double t, double x, const SpecialFnConfig& cfg) {
  if (!(t > 0.0) || !(x >= 0.0))
    throw DomainError("upper_gamma: requires t > 0 and x >= 0");
  if (x == 0.0) return std::tgamma(t);
  if (std::isinf(x)) return 0.0;
  if (x < t + 1.0) return std::tgamma(t) - lower_gamma_series(t, x, cfg);
  return upper_gamma_cf(t, x, cfg);
}

double exp_int1_small(double x) {
  if (!(x > 0.0) || x > 0.01)
    throw DomainError("exp_int1_small: requires 0 < x <= 0.01");
  return -euler_gamma - std::log(x);
}

double exp_diff(double a, double b) {
  if (a == b || std::isinf(a)) return 0.0;
  if (std::isinf(b)) return std::exp(-a);
  return -std::exp(-a) * std::expm1(a - b);
}

double exp_int1_diff(double a, double b, const SpecialFnConfig& cfg) {
  if (!(a > 0.0) || !(b >= a))
    throw DomainError("exp_int1_diff: requires 0 < a <= b");
  if (a == b) return 0.0;
  if (std::isinf(b)) return exp_int(1.0, a, cfg);
  if (b <= 0.9) {
    // E_1(a) - E_1(b) = ln(b/a) - sum_{k>=1} (-1)^(k+1) (b^k - a^k)/(k k!);
    // the logarithms cancel exactly, so tiny arguments stay accurate.
    const double lr = std::log(b / a);
    double acc = lr;
    double ak = 1.0, bk = 1.0, sign_kfac = 1.0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
      ak *= a;
      bk *= b;
      sign_kfac *= -1.0 / k;
      const double diff = (lr < 0.5) ? ak * std::expm1(k * lr) : bk - ak;
      const double term = sign_kfac * diff / k;
      acc += term;
      if (std::abs(term) <= cfg.rel_tol * std::abs(acc) && k >= 2) return acc;
    }
    throw NonConvergence("exp_int1_diff: series did not converge");
  }
  return exp_int(1.0, a, cfg) - exp_int(1.0, b, cfg);
}

double upper_gamma_diff(double t, double a, double b, const SpecialFnConfig& cfg) {
  if (!(t > 0.0) || !(a >= 0.0) || !(b >= a))
    throw DomainError("upper_gamma_diff: requires t > 0 and 0 <= a <= b");
  if (a == b) return 0.0;
  if (std::isinf(b)) return upper_gamma(t, a, cfg);
  if (b <= 0.9) {
    const double la = (a == 0.0) ? -kInf : std::log(a);
    const double lb = std::log(b);
    return scaled_upper_gamma_diff(t, 0.0, la, lb, cfg);
  }
  return upper_gamma(t, a, cfg) - upper_gamma(t, b, cfg);
}

double exp_int1_log(double l, const SpecialFnConfig& cfg) {
  if (std::isinf(l) && l > 0.0) return 0.0;
  if (l > 700.0) return 0.0;
  if (l < -69.0) return -euler_gamma - l;
  return exp_int(1.0, std::exp(l), cfg);
}

double exp_diff_log(double l1, double l2) {
  if (l1 == l2) return 0.0;
  return exp_diff(std::exp(l1), std::exp(l2));
}

double scaled_upper_gamma_diff(double t, double lC, double le1, double le2,
                               const SpecialFnConfig& cfg) {
  if (!(t > 0.0) || !(le2 >= le1))
    throw DomainError("scaled_upper_gamma_diff: requires t > 0 and le1 <= le2");
  if (le1 == le2) return 0.0;
  if (std::isinf(le2) && le2 < 0.0) return 0.0;
  if (le2 <= -0.10536051565782631) {  // exp(le2) <= 0.9: termwise lower series
    // Gamma(t,e1) - Gamma(t,e2) = sum_n (-1)^n/(n!(t+n)) (e2^(t+n) - e1^(t+n));
    // each power difference is folded against exp(lC) so that only the final
    // product need be representable.
    double acc = 0.0;
    double sign_nfac = 1.0;
    for (int n = 0; n <= cfg.max_iter; ++n) {
      if (n > 0) sign_nfac *= -1.0 / n;
      const double q = t + n;
      const double term =
          sign_nfac / q * std::exp(lC + q * le2) * (-std::expm1(q * (le1 - le2)));
      acc += term;
      if (std::abs(term) <= 1e-16 * std::abs(acc) && n >= 3) return acc;
    }
    throw NonConvergence("scaled_upper_gamma_diff: series did not converge");
  }
  const double e1 = std::exp(le1);
  const double e2 = std::exp(le2);
  return std::exp(lC) * (upper_gamma(t, e1, cfg) - upper_gamma(t, e2, cfg));
}

}  // namespace qsfl::special
