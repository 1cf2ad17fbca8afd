#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gibbspart/errors.hpp"

namespace gibbspart {

// x(x+1)...(x+n-1), empty product = 1. Log-space when every factor is
// positive, direct product otherwise (factors may vanish or change sign).
inline double pochhammer(double x, long n) {
  if (n < 0) throw domain_error("pochhammer: n must be >= 0");
  if (n == 0) return 1.0;
  if (x > 0.0) return std::exp(std::lgamma(x + static_cast<double>(n)) - std::lgamma(x));
  double p = 1.0;
  for (long i = 0; i < n; ++i) p *= x + static_cast<double>(i);
  return p;
}

inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double binomial(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(log_binomial(static_cast<double>(n), static_cast<double>(k)));
}

inline double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

namespace detail {

inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw numeric_error("incomplete gamma series did not converge");
}

inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x), a > 0.
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution.
inline double chi_square_sf(double stat, double dof) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

// Kolmogorov distribution survival Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
  if (lambda < 0.18) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Chebyshev fit of a scalar function on [lo,hi]; evaluation by Clenshaw.
struct ChebSegment {
  double lo = 0.0, hi = 0.0;
  std::vector<double> coef;

  double eval(double x) const {
    const double t = (2.0 * x - lo - hi) / (hi - lo);
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t i = coef.size(); i-- > 1;) {
      const double b2 = b1;
      b1 = b0;
      b0 = 2.0 * t * b1 - b2 + coef[i];
    }
    return t * b0 - b1 + coef[0];
  }
};

template <class F>
inline ChebSegment cheb_fit(F&& f, double lo, double hi, int degree) {
  const int n = degree + 1;
  std::vector<double> fv(n);
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < n; ++j) {
    const double theta = pi * (j + 0.5) / n;
    const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(theta);
    fv[j] = f(x);
  }
  ChebSegment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.coef.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fv[j] * std::cos(pi * i * (j + 0.5) / n);
    seg.coef[i] = 2.0 * s / n;
  }
  seg.coef[0] *= 0.5;
  return seg;
}

}  // namespace gibbspart
