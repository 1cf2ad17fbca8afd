#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "gibbspart/errors.hpp"

namespace gibbspart {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 512;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK dqk15 constants).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGk15Wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGk15Wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline std::pair<double, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGk15X[i]);
    fv[14 - i] = f(c + h * kGk15X[i]);
  }
  fv[7] = f(c);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 7; ++i) {
    kron += kGk15Wk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kGk15Wg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron += kGk15Wk[7] * fv[7];
  gauss += kGk15Wg[3] * fv[7];
  kron *= h;
  gauss *= h;
  return {kron, std::fabs(kron - gauss)};
}

struct Panel {
  double a, b, value, error;
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod on a finite interval. Optional interior
// breakpoints seed the initial panels so localized features inside a wide
// interval cannot be missed by the first coarse rule.
template <class F>
inline QuadResult integrate_adaptive(F&& f, double a, double b, QuadOptions opt = {},
                                     const std::vector<double>& breakpoints = {}) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::vector<detail::Panel> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto [v, e] = detail::gk15(f, edges[i], edges[i + 1]);
    panels.push_back({edges[i], edges[i + 1], v, e});
  }
  res.panels = static_cast<int>(panels.size());
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
    if (err <= tol || err == 0.0) {
      res.value = total;
      res.error = err;
      res.converged = true;
      return res;
    }
    if (res.panels >= opt.max_panels) {
      res.value = total;
      res.error = err;
      res.converged = false;
      return res;
    }
    const detail::Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {  // interval exhausted at machine precision
      res.value = 0.0;
      res.error = err;
      for (auto& q : panels) res.value += q.value;
      res.converged = true;
      return res;
    }
    auto [vl, el] = detail::gk15(f, p.a, mid);
    auto [vr, er] = detail::gk15(f, mid, p.b);
    panels[worst] = {p.a, mid, vl, el};
    panels.push_back({mid, p.b, vr, er});
    ++res.panels;
  }
}

template <class F>
inline double integrate(F&& f, double a, double b, QuadOptions opt = {},
                        const std::vector<double>& breakpoints = {}) {
  QuadResult r = integrate_adaptive(std::forward<F>(f), a, b, opt, breakpoints);
  if (!r.converged) throw numeric_error("quadrature did not converge", r.value);
  return r.value;
}

// ∫_a^∞ f(t) dt via t = a + u/(1-u).
template <class F>
inline double integrate_semi_inf(F&& f, double a, QuadOptions opt = {}) {
  auto g = [&](double u) {
    const double om = 1.0 - u;
    const double t = a + u / om;
    return f(t) / (om * om);
  };
  return integrate(g, 0.0, 1.0, opt);
}

// ∫_0^∞ f(t) dt for integrands that decay at both ends (densities, Laplace
// integrands). Substituting t = e^x turns polynomial tails into exponential
// ones; the default x-range covers t in [2e-22, 1e26]. Seed panels keep an
// O(1)-wide density bump visible to the first adaptive pass.
template <class F>
inline double integrate_positive_axis(F&& f, QuadOptions opt = {}, double x_lo = -50.0,
                                      double x_hi = 60.0) {
  auto g = [&](double x) {
    const double t = std::exp(x);
    return f(t) * t;
  };
  return integrate(g, x_lo, x_hi, opt, {-30.0, -15.0, -7.0, -3.0, -1.0, 1.0, 3.0, 7.0, 15.0, 30.0});
}

}  // namespace gibbspart
