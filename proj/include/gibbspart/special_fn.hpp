#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gibbspart/errors.hpp"
#include "gibbspart/mathutil.hpp"
#include "gibbspart/quadrature.hpp"
#include "gibbspart/stable.hpp"

namespace gibbspart {

// Generalized Stirling numbers S_alpha(n,k) for the stable block-count law.
// Built by the triangular recurrence S(n+1,k) = S(n,k-1) + (n - k alpha) S(n,k),
// S(1,1) = 1; all terms are positive so the recurrence is stable.
class StirlingTable {
 public:
  StirlingTable(StableIndex alpha, int n_max) : alpha_(alpha.value()), n_max_(n_max) {
    if (n_max < 1) throw domain_error("StirlingTable: n_max must be >= 1");
    s_.assign(static_cast<std::size_t>(n_max) * n_max, 0.0);
    at(1, 1) = 1.0;
    for (int n = 1; n < n_max; ++n) {
      for (int k = 1; k <= n + 1; ++k) {
        double v = 0.0;
        if (k >= 2 && k - 1 <= n) v += at(n, k - 1);
        if (k <= n) v += (n - k * alpha_) * at(n, k);
        at(n + 1, k) = v;
      }
    }
  }

  double value(int n, int k) const {
    if (k < 1 || k > n || n > n_max_) throw domain_error("StirlingTable: need 1 <= k <= n <= n_max");
    return s_[idx(n, k)];
  }

 private:
  std::size_t idx(int n, int k) const {
    return static_cast<std::size_t>(n - 1) * n_max_ + (k - 1);
  }
  double& at(int n, int k) { return s_[idx(n, k)]; }

  double alpha_;
  int n_max_;
  std::vector<double> s_;
};

inline double gen_stirling(StableIndex alpha, int n, int k) {
  if (k < 1 || k > n) throw domain_error("gen_stirling: need 1 <= k <= n");
  return StirlingTable(alpha, n).value(n, k);
}

// Explicit alternating sum [alpha^k k!]^{-1} sum_j (-1)^j C(k,j) (-j alpha)_n;
// kept as an independent route for cross-checks. The optional condition
// output reports max|term| / |sum|, the cancellation factor limiting the
// achievable relative accuracy (grows quickly with n at small alpha).
inline double gen_stirling_altsum(StableIndex alpha, int n, int k,
                                  double* condition = nullptr) {
  if (k < 1 || k > n) throw domain_error("gen_stirling_altsum: need 1 <= k <= n");
  const double a = alpha.value();
  double sum = 0.0;
  double max_term = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double sign = (j % 2 == 1) ? -1.0 : 1.0;
    const double term = sign * binomial(k, j) * pochhammer(-j * a, n);
    sum += term;
    max_term = std::max(max_term, std::fabs(term));
  }
  if (condition != nullptr) *condition = max_term / std::max(std::fabs(sum), 1e-300);
  return sum / (std::pow(a, k) * std::exp(std::lgamma(k + 1.0)));
}

// E[T_alpha^{-theta}] = Gamma(theta/alpha + 1) / Gamma(theta + 1), theta > -alpha.
inline double stable_neg_moment(StableIndex alpha, double theta) {
  if (!(theta > -alpha.value())) throw domain_error("stable_neg_moment: need theta > -alpha");
  return std::exp(std::lgamma(theta / alpha.value() + 1.0) - std::lgamma(theta + 1.0));
}

// Mittag-Leffler density g_a(s) of L_1 = T_alpha^{-alpha}.
inline double ml_pdf(StableIndex alpha, double s, const DensityEvalConfig& cfg = {}) {
  if (!(s > 0.0)) throw domain_error("ml_pdf: s must be > 0");
  const double a = alpha.value();
  const double t = std::pow(s, -1.0 / a);
  return stable_pdf(alpha, t, cfg) * std::pow(s, -1.0 / a - 1.0) / a;
}

inline double ml_pdf(const StableDensity& f, double s) {
  if (!(s > 0.0)) throw domain_error("ml_pdf: s must be > 0");
  const double a = f.index().value();
  const double t = std::pow(s, -1.0 / a);
  return f(t) * std::pow(s, -1.0 / a - 1.0) / a;
}

// Generalized Mittag-Leffler density g_{a,theta}(s) = s^{theta/a} g_a(s) / E[T^{-theta}].
inline double gml_pdf(StableIndex alpha, double theta, double s,
                      const DensityEvalConfig& cfg = {}) {
  if (!(theta > -alpha.value())) throw domain_error("gml_pdf: need theta > -alpha");
  if (!(s > 0.0)) throw domain_error("gml_pdf: s must be > 0");
  return std::pow(s, theta / alpha.value()) * ml_pdf(alpha, s, cfg) /
         stable_neg_moment(alpha, theta);
}

inline double gml_pdf(const StableDensity& f, double theta, double s) {
  const StableIndex alpha = f.index();
  if (!(theta > -alpha.value())) throw domain_error("gml_pdf: need theta > -alpha");
  if (!(s > 0.0)) throw domain_error("gml_pdf: s must be > 0");
  return std::pow(s, theta / alpha.value()) * ml_pdf(f, s) / stable_neg_moment(alpha, theta);
}

// E_{beta,1}(-lambda) = E[exp(-lambda T_beta^{-beta})]. Series below the
// crossover, Laplace quadrature against g_beta above it (the alternating
// series cancels badly for large lambda).
inline double ml_function(StableIndex beta, double lam, const DensityEvalConfig& cfg = {},
                          double series_switch = 5.0) {
  if (lam < 0.0) throw domain_error("ml_function: lambda must be >= 0");
  if (lam == 0.0) return 1.0;
  const double b = beta.value();
  if (lam <= series_switch) {
    double sum = 0.0;
    int settled = 0;
    for (int l = 0; l <= cfg.max_terms; ++l) {
      const double term =
          ((l % 2 == 0) ? 1.0 : -1.0) * std::exp(l * std::log(lam) - std::lgamma(b * l + 1.0));
      sum += term;
      if (std::fabs(term) < 1e-16 * std::fabs(sum) + 1e-300) {
        if (++settled >= 2) break;
      } else {
        settled = 0;
      }
      if (l == cfg.max_terms) throw numeric_error("ml_function: series stalled", sum);
    }
    return sum;
  }
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.max_panels = 1024;
  return integrate_positive_axis(
      [&](double s) { return std::exp(-lam * s) * ml_pdf(beta, s, cfg); }, opt);
}

// E^{(theta'/beta+1)}_{beta,theta'+1}(-lambda) with theta' = theta + j*beta;
// the Laplace transform of ML(beta, theta'). The series crossover sits lower
// than ml_function's: the Gamma(theta'/beta+1+l) factor inflates the
// alternating terms, so cancellation sets in earlier.
inline double gml_function(StableIndex beta, double theta, long j, double lam,
                           const DensityEvalConfig& cfg = {}, double series_switch = 2.0) {
  if (lam < 0.0) throw domain_error("gml_function: lambda must be >= 0");
  if (j < 0) throw domain_error("gml_function: j must be >= 0");
  const double b = beta.value();
  const double th = theta + static_cast<double>(j) * b;
  if (!(th > -b)) throw domain_error("gml_function: need theta + j*beta > -beta");
  if (lam == 0.0) return 1.0;
  if (lam <= series_switch) {
    const double lg0 = std::lgamma(th / b + 1.0);
    const double lgt = std::lgamma(th + 1.0);
    double sum = 0.0;
    int settled = 0;
    for (int l = 0; l <= cfg.max_terms; ++l) {
      const double lmag = l * std::log(lam) - std::lgamma(l + 1.0) +
                          std::lgamma(th / b + 1.0 + l) + lgt - lg0 -
                          std::lgamma(b * l + th + 1.0);
      const double term = ((l % 2 == 0) ? 1.0 : -1.0) * std::exp(lmag);
      sum += term;
      if (std::fabs(term) < 1e-16 * std::fabs(sum) + 1e-300) {
        if (++settled >= 2) break;
      } else {
        settled = 0;
      }
      if (l == cfg.max_terms) throw numeric_error("gml_function: series stalled", sum);
    }
    return sum;
  }
  QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.max_panels = 1024;
  return integrate_positive_axis(
      [&](double s) { return std::exp(-lam * s) * gml_pdf(beta, th, s, cfg); }, opt);
}

// Hermite function H~_{-2q}(s) = 2^{-q} U(q, 1/2, s^2/2) via the series
// sum_l (-s)^l / l! * Gamma(q + l/2) 2^{q + l/2} / (2 Gamma(2q)).
// q = 0 is the constant 1 (the Gamma(2q) pole cancels the confluent-U limit).
inline double hermite_fn(double q, double s, const DensityEvalConfig& cfg = {}) {
  if (q < 0.0) throw domain_error("hermite_fn: q must be >= 0");
  if (s < 0.0) throw domain_error("hermite_fn: s must be >= 0");
  if (q == 0.0) return 1.0;
  const double lg2q = std::lgamma(2.0 * q);
  const double ln2 = std::log(2.0);
  double sum = 0.0;
  double max_term = 0.0;
  int settled = 0;
  for (int l = 0; l <= cfg.max_terms; ++l) {
    double lmag = std::lgamma(q + 0.5 * l) + (q + 0.5 * l) * ln2 - ln2 - lg2q -
                  std::lgamma(l + 1.0);
    if (l > 0) lmag += l * std::log(s == 0.0 ? 1e-300 : s);
    if (s == 0.0 && l > 0) break;
    const double term = ((l % 2 == 0) ? 1.0 : -1.0) * std::exp(lmag);
    sum += term;
    max_term = std::max(max_term, std::fabs(term));
    if (std::fabs(term) < 1e-16 * std::fabs(sum) + 1e-300) {
      if (++settled >= 2) break;
    } else {
      settled = 0;
    }
    if (l == cfg.max_terms) throw numeric_error("hermite_fn: series stalled", sum);
  }
  if (max_term > 1e13 * std::max(std::fabs(sum), 1e-290)) {
    throw numeric_error("hermite_fn: catastrophic cancellation", sum);
  }
  return sum;
}

// f^(n-k b)_{b, k b}(y): conditional density of T_beta given K_n = k,
//   f^(q)(y) = b Gamma(n) y^{-n} / (Gamma(k) Gamma(q)) Int_0^y f_b(v) (y-v)^{q-1} dv,
// q = n - k b. The integral (rescaled by y^{q-1} so no power over- or
// underflows) is split at v = y/2: the outer piece absorbs the endpoint
// singularity through the substitution v = y(1 - u^{1/q}); the inner piece is
// integrated in log v, where the density bump has unit width at any scale.
inline double tilted_y_pdf(const StableDensity& f, int n, int k, double y,
                           double rel_tol = 1e-10) {
  if (k < 1 || k > n) throw domain_error("tilted_y_pdf: need 1 <= k <= n");
  if (!(y > 0.0)) throw domain_error("tilted_y_pdf: y must be > 0");
  const double b = f.index().value();
  const double q = n - k * b;
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  opt.max_panels = 1024;

  // I_scaled = Int_0^y f(v) ((y-v)/y)^{q-1} dv
  auto outer = [&](double u) {
    const double v = y * (1.0 - std::pow(u, 1.0 / q));
    return v <= 0.0 ? 0.0 : f(v);
  };
  QuadResult ra = integrate_adaptive(outer, 0.0, std::pow(2.0, -q), opt);
  if (!ra.converged) throw numeric_error("tilted_y_pdf: outer quadrature failed", ra.value);
  double i_scaled = (y / q) * ra.value;

  const double x_lo = std::log(std::max(f.support_floor(), y * 1e-280));
  const double x_hi = std::log(0.5 * y);
  if (x_hi > x_lo) {
    auto inner = [&](double x) {
      const double v = std::exp(x);
      return f(v) * std::pow(1.0 - v / y, q - 1.0) * v;
    };
    std::vector<double> seeds;
    for (double s : {-30.0, -15.0, -7.0, -3.0, -1.0, 0.0, 1.0, 3.0, 7.0, 15.0, 30.0}) {
      if (s > x_lo && s < x_hi) seeds.push_back(s);
    }
    QuadResult rb = integrate_adaptive(inner, x_lo, x_hi, opt, seeds);
    if (!rb.converged) throw numeric_error("tilted_y_pdf: inner quadrature failed", rb.value);
    i_scaled += rb.value;
  }
  if (!(i_scaled > 0.0)) return 0.0;
  const double lc = std::log(b) + std::lgamma(n) - std::lgamma(k) - std::lgamma(q) +
                    (q - 1.0 - n) * std::log(y);
  return std::exp(lc + std::log(i_scaled));
}

inline double tilted_y_pdf(StableIndex beta, int n, int k, double y,
                           const DensityEvalConfig& cfg = {}) {
  return tilted_y_pdf(StableDensity(beta, cfg), n, k, y);
}

// Gnedin-Pitman G^{(n,k)}_beta(y) = [f^(n-kb)_{b,kb}(y) / f_b(y)] Gamma(k) b^{k-1} / Gamma(n).
inline double big_g(const StableDensity& f, int n, int k, double y) {
  const double b = f.index().value();
  const double fy = f(y);
  if (!(fy > 0.0)) throw numeric_error("big_g: f_beta(y) underflowed");
  return tilted_y_pdf(f, n, k, y) * std::exp(std::lgamma(k) + (k - 1.0) * std::log(b) -
                                             std::lgamma(n)) /
         fy;
}

// Psi^{[alpha]}_{n,k} = E[h(T_alpha) | K_n = k] = Int h(t) f^(n-k a)_{a,ka}(t) dt.
inline double psi_weight(const StableDensity& f, const std::function<double(double)>& h, int n,
                         int k, double rel_tol = 1e-9) {
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-280;
  opt.max_panels = 2048;
  return integrate_positive_axis([&](double t) { return h(t) * tilted_y_pdf(f, n, k, t); }, opt);
}

}  // namespace gibbspart
