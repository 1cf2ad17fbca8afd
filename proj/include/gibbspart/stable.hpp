#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "gibbspart/errors.hpp"
#include "gibbspart/mathutil.hpp"
#include "gibbspart/quadrature.hpp"

namespace gibbspart {

// Index of a one-sided stable subordinator, constrained to (0,1).
class StableIndex {
 public:
  explicit StableIndex(double v) : v_(v) {
    if (!(v > 0.0 && v < 1.0)) throw domain_error("StableIndex: value must lie in (0,1)");
  }
  double value() const { return v_; }

 private:
  double v_;
};

struct DensityEvalConfig {
  double rel_tol = 1e-10;
  int max_terms = 400;
  int quad_points = 256;
  // Abscissa where the density evaluation switches from the Zolotarev
  // integral (below) to the power series in t^{-alpha} (above).
  double switch_point = 1.0;

  void validate() const {
    if (!(rel_tol > 0.0)) throw domain_error("DensityEvalConfig: rel_tol must be > 0");
    if (max_terms < 1) throw domain_error("DensityEvalConfig: max_terms must be >= 1");
    if (quad_points < 16) throw domain_error("DensityEvalConfig: quad_points must be >= 16");
  }
};

namespace detail {

constexpr double kPi = 3.14159265358979323846;

// log of Zolotarev's A(phi) for phi in (0,pi):
//   A(phi) = sin((1-a)phi) sin(a phi)^{a/(1-a)} / sin(phi)^{1/(1-a)}, increasing.
inline double zolotarev_log_a(double alpha, double phi) {
  const double r = 1.0 / (1.0 - alpha);
  return std::log(std::sin((1.0 - alpha) * phi)) + alpha * r * std::log(std::sin(alpha * phi)) -
         r * std::log(std::sin(phi));
}

inline double zolotarev_a0(double alpha) {
  return (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
}

}  // namespace detail

// Density of the Levy(1/2) subordinator normalized so E[e^{-s T}] = e^{-sqrt(s)}.
inline double levy_half_pdf(double t) {
  if (t <= 0.0) return 0.0;
  const double l = -0.5 * std::log(4.0 * detail::kPi) - 1.5 * std::log(t) - 0.25 / t;
  return std::exp(l);
}

// Convergent series f_a(t) = (1/pi) sum_{j>=1} (-1)^{j+1} Gamma(ja+1)/j! sin(j pi a) t^{-ja-1}.
// Accurate for larger t; cancellation-prone for small t.
inline double stable_pdf_series(double alpha, double t, const DensityEvalConfig& cfg = {}) {
  const double lt = std::log(t);
  double sum = 0.0;
  double max_term = 0.0;
  int settled = 0;
  for (int j = 1; j <= cfg.max_terms; ++j) {
    const double s = std::sin(j * detail::kPi * alpha);
    const double lmag =
        std::lgamma(j * alpha + 1.0) - std::lgamma(j + 1.0) - (j * alpha + 1.0) * lt;
    const double term = ((j % 2 == 1) ? 1.0 : -1.0) * s * std::exp(lmag);
    sum += term;
    max_term = std::max(max_term, std::fabs(term));
    if (std::fabs(term) < cfg.rel_tol * std::fabs(sum) + 1e-300) {
      if (++settled >= 2) break;
    } else {
      settled = 0;
    }
    if (j == cfg.max_terms) {
      throw numeric_error("stable_pdf_series: no convergence", sum / detail::kPi);
    }
  }
  if (max_term > 1e13 * std::max(std::fabs(sum), 1e-290)) {
    throw numeric_error("stable_pdf_series: catastrophic cancellation", sum / detail::kPi);
  }
  return std::max(0.0, sum / detail::kPi);
}

// Zolotarev single-integral representation over (0,pi); good for small and
// moderate t, degrades as t grows (integrand loses its exponential damping).
inline double stable_pdf_integral(double alpha, double t, const DensityEvalConfig& cfg = {}) {
  const double r = 1.0 / (1.0 - alpha);
  const double c = std::pow(t, -alpha * r);
  const double log_c = -alpha * r * std::log(t);
  auto integrand = [&](double phi) {
    const double la = detail::zolotarev_log_a(alpha, phi);
    if (la + log_c > 690.0) return 0.0;  // e^{-cA} underflows regardless
    const double e = la - c * std::exp(la);
    return e < -740.0 ? 0.0 : std::exp(e);
  };
  QuadOptions opt;
  opt.rel_tol = std::max(cfg.rel_tol, 1e-12);
  opt.abs_tol = 1e-300;
  opt.max_panels = cfg.quad_points;
  QuadResult q = integrate_adaptive(integrand, 0.0, detail::kPi, opt);
  if (!q.converged) throw numeric_error("stable_pdf_integral: quadrature failed", q.value);
  return std::max(0.0, alpha * r * std::pow(t, -r) * q.value / detail::kPi);
}

// Density f_alpha(t) of the positive alpha-stable law with E[e^{-s T}] = e^{-s^alpha}.
inline double stable_pdf(StableIndex alpha, double t, const DensityEvalConfig& cfg = {}) {
  cfg.validate();
  if (!(t > 0.0)) throw domain_error("stable_pdf: t must be > 0");
  const double a = alpha.value();
  if (std::fabs(a - 0.5) < 1e-14) return levy_half_pdf(t);
  if (t >= cfg.switch_point) return stable_pdf_series(a, t, cfg);
  return stable_pdf_integral(a, t, cfg);
}

// Cached evaluator of f_alpha for one fixed index. Construction fits
// piecewise Chebyshev polynomials to log f over log t; evaluation costs a
// binary search plus one Clenshaw recurrence. Immutable after construction.
class StableDensity {
 public:
  explicit StableDensity(StableIndex alpha, DensityEvalConfig cfg = {})
      : alpha_(alpha), cfg_(cfg) {
    cfg_.validate();
    const double a = alpha_.value();
    const double a0 = detail::zolotarev_a0(a);
    const double expo = (1.0 - a) / a;
    // Below t_zero the essential singularity pushes f under ~1e-304.
    t_zero_ = std::pow(a0 / 700.0, expo);
    // The Chebyshev fit covers the whole working support so interior
    // evaluations never fall back to the slow branches.
    t_lo_ = t_zero_;
    t_hi_ = 1e6;
    build();
  }

  StableIndex index() const { return alpha_; }
  const DensityEvalConfig& config() const { return cfg_; }
  // Below this abscissa the essential singularity drives f under 1e-300.
  double support_floor() const { return t_zero_; }

  // Uncached evaluation (branch dispatch as in stable_pdf).
  double exact(double t) const {
    if (!(t > 0.0)) throw domain_error("StableDensity: t must be > 0");
    const double a = alpha_.value();
    if (std::fabs(a - 0.5) < 1e-14) return levy_half_pdf(t);
    if (t >= cfg_.switch_point) return stable_pdf_series(a, t, cfg_);
    return stable_pdf_integral(a, t, cfg_);
  }

  double operator()(double t) const {
    if (!(t > 0.0)) throw domain_error("StableDensity: t must be > 0");
    if (std::fabs(alpha_.value() - 0.5) < 1e-14) return levy_half_pdf(t);
    if (t <= t_zero_) return 0.0;
    if (t < t_lo_ || t > t_hi_) return exact(t);
    const double x = std::log(t);
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (segments_[mid].hi < x) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return std::exp(segments_[lo].eval(x));
  }

 private:
  void build() {
    if (std::fabs(alpha_.value() - 0.5) < 1e-14) return;  // closed form, no cache
    auto logf = [&](double x) {
      const double v = exact(std::exp(x));
      return v > 0.0 ? std::log(v) : -746.0;
    };
    const double x_lo = std::log(t_lo_);
    const double x_hi = std::log(t_hi_);
    const double x_sw = std::log(std::max(t_lo_ * (1.0 + 1e-12), std::min(cfg_.switch_point, t_hi_)));
    // Segment boundaries align with the series/integral seam so each fit sees
    // a single analytic branch.
    if (x_sw > x_lo) fit_range(logf, x_lo, x_sw);
    if (x_hi > x_sw) fit_range(logf, std::max(x_sw, x_lo), x_hi);
  }

  template <class F>
  void fit_range(F&& logf, double lo, double hi) {
    const int degree = 20;
    double x = lo;
    double width = std::min(1.0, hi - lo);
    while (x < hi - 1e-12) {
      double w = std::min(width, hi - x);
      for (;;) {
        ChebSegment seg = cheb_fit(logf, x, x + w, degree);
        double scale = 0.0;
        for (double c : seg.coef) scale = std::max(scale, std::fabs(c));
        const double tail = std::fabs(seg.coef[degree]) + std::fabs(seg.coef[degree - 1]);
        if (tail < 1e-10 * std::max(scale, 1.0) || w < 1e-3) {
          segments_.push_back(std::move(seg));
          x += w;
          width = std::min(1.0, w * 2.0);
          break;
        }
        w *= 0.5;
      }
    }
  }

  StableIndex alpha_;
  DensityEvalConfig cfg_;
  double t_zero_ = 0.0, t_lo_ = 0.0, t_hi_ = 0.0;
  std::vector<ChebSegment> segments_;
};

using StableDensityPtr = std::shared_ptr<const StableDensity>;

inline StableDensityPtr make_stable_density(StableIndex alpha, DensityEvalConfig cfg = {}) {
  return std::make_shared<StableDensity>(alpha, cfg);
}

}  // namespace gibbspart
