#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gibbspart/eppf.hpp"
#include "gibbspart/errors.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/quadrature.hpp"
#include "gibbspart/rng.hpp"
#include "gibbspart/special_fn.hpp"
#include "gibbspart/stable.hpp"

namespace gibbspart {

// Positive alpha-stable draw, E[e^{-s T}] = e^{-s^alpha}, by the
// Chambers-Mallows-Stuck / Kanter transform T = (A(pi U)/E)^{(1-a)/a}.
inline double sample_stable(StableIndex alpha, RngStream& rng) {
  const double a = alpha.value();
  const double u = rng.uniform01();
  const double e = rng.exponential();
  const double log_a_fn = detail::zolotarev_log_a(a, detail::kPi * u);
  return std::exp(((1.0 - a) / a) * (log_a_fn - std::log(e)));
}

struct GemDraw {
  std::vector<double> sticks;  // size-biased order
  double tail = 0.0;
};

// GEM(alpha, theta) stick-breaking: R_k ~ Beta(1-alpha, theta + k alpha),
// P_k = R_k prod_{j<k} (1-R_j). alpha = 0 is allowed (iid Beta(1,theta) sticks,
// used by the beta = 0 fixed-point cases).
inline GemDraw sample_gem_sticks(double alpha, double theta, int count, RngStream& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw domain_error("sample_gem: need alpha in [0,1)");
  if (!(theta > -alpha)) throw domain_error("sample_gem: need theta > -alpha");
  if (count < 1) throw domain_error("sample_gem: count must be >= 1");
  GemDraw d;
  d.sticks.reserve(static_cast<std::size_t>(count));
  double remaining = 1.0;
  for (int k = 1; k <= count; ++k) {
    const double r = rng.beta(1.0 - alpha, theta + k * alpha);
    d.sticks.push_back(r * remaining);
    remaining *= (1.0 - r);
  }
  d.tail = remaining;
  return d;
}

inline MassPartition sample_gem(double alpha, double theta, int count, RngStream& rng) {
  GemDraw d = sample_gem_sticks(alpha, theta, count, rng);
  return rank_masses(std::move(d.sticks), d.tail);
}

// Two-parameter seating rule: join block j w.p. (n_j - alpha)/(m + theta),
// open a new one w.p. (theta + k alpha)/(m + theta).
inline SetPartition sample_pd_partition(StableIndex alpha, double theta, int n, RngStream& rng) {
  const double a = alpha.value();
  if (!(theta > -a)) throw domain_error("sample_pd_partition: need theta > -alpha");
  if (n < 1) throw domain_error("sample_pd_partition: n must be >= 1");
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<double> sizes;
  labels[0] = 0;
  sizes.push_back(1.0);
  for (int i = 1; i < n; ++i) {
    const double total = i + theta;
    double u = rng.uniform01() * total;
    int pick = static_cast<int>(sizes.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      u -= sizes[j] - a;
      if (u <= 0.0) {
        pick = static_cast<int>(j);
        break;
      }
    }
    if (pick == static_cast<int>(sizes.size())) {
      sizes.push_back(1.0);
    } else {
      sizes[pick] += 1.0;
    }
    labels[i] = pick;
  }
  return SetPartition::from_labels(labels);
}

// Sequential sampler driven by EPPF ratios; exact for any consistent EPPF.
// Values are memoized per block-size multiset, so repeated draws from one
// evaluator cost table lookups.
class PartitionSampler {
 public:
  explicit PartitionSampler(const Eppf& eppf) : eppf_(&eppf) {}

  SetPartition draw(int n, RngStream& rng) {
    if (n < 1) throw domain_error("PartitionSampler: n must be >= 1");
    if (n > eppf_->n_max()) throw domain_error("PartitionSampler: n exceeds evaluator table");
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<int> sizes;
    labels[0] = 0;
    sizes.push_back(1);
    for (int i = 1; i < n; ++i) {
      const Composition c{std::vector<int>(sizes.begin(), sizes.end())};
      const double le0 = log_eval_cached(c);
      std::map<int, double> join_by_size;
      std::vector<double> w(sizes.size() + 1, 0.0);
      double total = 0.0;
      for (std::size_t j = 0; j < sizes.size(); ++j) {
        auto it = join_by_size.find(sizes[j]);
        if (it == join_by_size.end()) {
          const double v = std::exp(log_eval_cached(c.with_incremented(sizes[j])) - le0);
          it = join_by_size.emplace(sizes[j], v).first;
        }
        w[j] = it->second;
        total += w[j];
      }
      w[sizes.size()] = std::exp(log_eval_cached(c.with_new_singleton()) - le0);
      total += w[sizes.size()];
      double u = rng.uniform01() * total;
      int pick = static_cast<int>(sizes.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        u -= w[j];
        if (u <= 0.0) {
          pick = static_cast<int>(j);
          break;
        }
      }
      if (pick >= static_cast<int>(sizes.size())) {
        pick = static_cast<int>(sizes.size());
        sizes.push_back(1);
      } else {
        sizes[pick] += 1;
      }
      labels[i] = pick;
    }
    return SetPartition::from_labels(labels);
  }

 private:
  double log_eval_cached(const Composition& c) {
    auto it = cache_.find(c.sizes());
    if (it != cache_.end()) return it->second;
    const double v = eppf_->log_eval(c);
    cache_.emplace(c.sizes(), v);
    return v;
  }

  const Eppf* eppf_;
  std::map<std::vector<int>, double> cache_;
};

inline SetPartition sample_eppf_partition(const Eppf& eppf, int n, RngStream& rng) {
  PartitionSampler s(eppf);
  return s.draw(n, rng);
}

struct JumpDraw {
  std::vector<double> jumps;  // strictly decreasing
  double tail_correction = 0.0;
  double total = 0.0;  // sum of jumps + tail correction; approximates T_alpha
};

// Ferguson-Klass inverse-Levy series: jump_i = (Gamma(1-a) G_i)^{-1/a} for
// standard-exponential partial sums G_i, truncated at `count` with the mean
// tail E[sum_{i>count}] = Gamma(1-a)^{-1/a} (a/(1-a)) G_count^{1-1/a} added.
inline JumpDraw sample_stable_jumps(StableIndex alpha, int count, RngStream& rng) {
  if (count < 1) throw domain_error("sample_stable_jumps: count must be >= 1");
  const double a = alpha.value();
  const double g1 = std::tgamma(1.0 - a);
  JumpDraw d;
  d.jumps.reserve(static_cast<std::size_t>(count));
  double arrival = 0.0;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    arrival += rng.exponential();
    const double j = std::pow(g1 * arrival, -1.0 / a);
    d.jumps.push_back(j);
    sum += j;
  }
  d.tail_correction = std::pow(g1, -1.0 / a) * (a / (1.0 - a)) * std::pow(arrival, 1.0 - 1.0 / a);
  d.total = sum + d.tail_correction;
  return d;
}

// Density tilt h selecting a PK_beta(h f_beta) family member. Unit mean is
// checked at construction by quadrature in Mittag-Leffler space, where every
// labeled family has light tails.
struct TiltFunction {
  enum class Label { unit, pd_theta, ml_lambda, gg_zeta };

  Label label = Label::unit;
  StableIndex beta;
  double param = 0.0;  // theta | lambda | zeta
  int m = 0;           // gg size-bias order
  std::function<double(double)> eval;
  std::optional<double> sup_bound;

  std::string name() const {
    switch (label) {
      case Label::unit:
        return "unit";
      case Label::pd_theta:
        return "pd_theta(" + std::to_string(param) + ")";
      case Label::ml_lambda:
        return "ml_lambda(" + std::to_string(param) + ")";
      case Label::gg_zeta:
        return "gg_zeta(" + std::to_string(param) + "," + std::to_string(m) + ")";
    }
    return "tilt";
  }

  double normalization_defect(const DensityEvalConfig& cfg = {}) const {
    const double b = beta.value();
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.max_panels = 2048;
    const double v = integrate_positive_axis(
        [&](double s) { return eval(std::pow(s, -1.0 / b)) * ml_pdf(beta, s, cfg); }, opt);
    return std::fabs(v - 1.0);
  }

  static TiltFunction unit(StableIndex beta) {
    TiltFunction t{Label::unit, beta, 0.0, 0, [](double) { return 1.0; }, 1.0};
    return t;
  }

  static TiltFunction pd_theta(StableIndex beta, double theta, bool validate = true) {
    if (!(theta > -beta.value())) throw domain_error("TiltFunction::pd_theta: need theta > -beta");
    const double norm = stable_neg_moment(beta, theta);
    TiltFunction t{Label::pd_theta, beta, theta, 0,
                   [theta, norm](double x) { return std::pow(x, -theta) / norm; },
                   std::nullopt};
    if (theta == 0.0) t.sup_bound = 1.0;
    if (validate) check(t);
    return t;
  }

  static TiltFunction ml_lambda(StableIndex beta, double lambda, bool validate = true) {
    if (!(lambda >= 0.0)) throw domain_error("TiltFunction::ml_lambda: lambda must be >= 0");
    const double b = beta.value();
    const double norm = ml_function(beta, lambda);
    TiltFunction t{Label::ml_lambda, beta, lambda, 0,
                   [lambda, b, norm](double x) { return std::exp(-lambda * std::pow(x, -b)) / norm; },
                   1.0 / norm};
    if (validate) check(t);
    return t;
  }

  static TiltFunction gg_zeta(StableIndex beta, double zeta, int m, bool validate = true) {
    if (!(zeta > 0.0)) throw domain_error("TiltFunction::gg_zeta: zeta must be > 0");
    if (m != 0 && m != 1) throw domain_error("TiltFunction::gg_zeta: m must be 0 or 1");
    const double b = beta.value();
    const double lam = std::pow(zeta, 1.0 / b);
    TiltFunction t;
    t.label = Label::gg_zeta;
    t.beta = beta;
    t.param = zeta;
    t.m = m;
    if (m == 0) {
      t.eval = [lam, zeta](double x) { return std::exp(zeta - lam * x); };
      t.sup_bound = std::exp(zeta);
    } else {
      // r^[1](t) = zeta^{1/b - 1} t e^{-zeta^{1/b} t} e^zeta / b, maximal at t = 1/lambda.
      const double c = std::pow(zeta, 1.0 / b - 1.0) / b;
      t.eval = [c, lam, zeta](double x) { return c * x * std::exp(zeta - lam * x); };
      t.sup_bound = c * std::exp(zeta - 1.0) / lam;
    }
    if (validate) check(t);
    return t;
  }

 private:
  TiltFunction() : beta(StableIndex(0.5)) {}
  TiltFunction(Label l, StableIndex b, double p, int mm, std::function<double(double)> e,
               std::optional<double> sup)
      : label(l), beta(b), param(p), m(mm), eval(std::move(e)), sup_bound(sup) {}

  static void check(const TiltFunction& t) {
    const double defect = t.normalization_defect();
    if (defect > 1e-6) {
      throw numeric_error("TiltFunction: E[h(T_beta)] != 1 (defect " + std::to_string(defect) + ")",
                          defect);
    }
  }
};

struct PkDraw {
  MassPartition masses;
  double t = 0.0;  // inverse local time draw
};

// PK_beta(h f_beta) masses by rejection: propose a Ferguson-Klass jump series
// with total T, accept with probability h(T)/sup h. Bounded tilts only.
inline PkDraw sample_pk_tilted(StableIndex beta, const TiltFunction& h, int count,
                               RngStream& rng) {
  if (!h.sup_bound) throw domain_error("sample_pk_tilted: tilt must carry sup_bound");
  const double sup = *h.sup_bound;
  long trials = 0;
  for (;;) {
    JumpDraw d = sample_stable_jumps(beta, count, rng);
    ++trials;
    if (rng.uniform01() <= h.eval(d.total) / sup) {
      std::vector<double> w(d.jumps.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = d.jumps[i] / d.total;
      PkDraw out;
      out.masses = rank_masses(std::move(w), d.tail_correction / d.total);
      out.t = d.total;
      return out;
    }
    if (trials >= 20000) {
      throw efficiency_error("sample_pk_tilted: acceptance below 1e-4; change parameters");
    }
  }
}

// tau_kappa(s): generalized gamma subordinator at time s, Laplace exponent
// s[(1+w)^kappa - 1]. Exact via divide-and-conquer exponential tilting: a sum
// of ceil(s) pieces, each a rejection draw with acceptance >= e^{-1}.
inline double sample_gg_subordinator(StableIndex kappa, double s, RngStream& rng) {
  if (s < 0.0) throw domain_error("sample_gg_subordinator: s must be >= 0");
  if (s == 0.0) return 0.0;
  const int pieces = static_cast<int>(std::ceil(s));
  const double scale = std::pow(s / pieces, 1.0 / kappa.value());
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) {
    for (;;) {
      const double x = scale * sample_stable(kappa, rng);
      if (x < 700.0 && rng.uniform01() <= std::exp(-x)) {
        sum += x;
        break;
      }
    }
  }
  return sum;
}

// Inverse local time of the (size-biased, for m=1) normalized generalized
// gamma family: m=0 draws tau_b(zeta)/zeta^{1/b}; m=1 draws
// tau_b(zeta + gamma_{(1-b)/b})/zeta^{1/b}.
inline double sample_gg_inverse_lt(StableIndex beta, double zeta, int m, RngStream& rng) {
  if (!(zeta > 0.0)) throw domain_error("sample_gg_inverse_lt: zeta must be > 0");
  if (m != 0 && m != 1) throw domain_error("sample_gg_inverse_lt: m must be 0 or 1");
  const double b = beta.value();
  double s = zeta;
  if (m == 1) s += rng.gamma((1.0 - b) / b);
  return sample_gg_subordinator(beta, s, rng) / std::pow(zeta, 1.0 / b);
}

// T_{alpha,theta}: polynomially tilted stable, density t^{-theta} f_a(t)/E[T^-theta].
// theta > 0 uses the exact generalized-gamma randomization
// T_{a,theta} = tau_a(g)/g^{1/a}, g ~ Gamma(theta/a); theta in (-a,0) descends
// via the size-biased product T_{a,theta} = T_{a,theta+1} B^{-1/a}.
inline double sample_poly_tilted_stable(StableIndex alpha, double theta, RngStream& rng) {
  const double a = alpha.value();
  if (!(theta > -a)) throw domain_error("sample_poly_tilted_stable: need theta > -alpha");
  if (theta == 0.0) return sample_stable(alpha, rng);
  if (theta > 0.0) {
    const double g = rng.gamma(theta / a);
    return sample_gg_subordinator(alpha, g, rng) / std::pow(g, 1.0 / a);
  }
  const double t1 = sample_poly_tilted_stable(alpha, theta + 1.0, rng);
  const double b = rng.beta((theta + a) / a, (1.0 - a) / a);
  return t1 * std::pow(b, -1.0 / a);
}

// Z_{alpha,theta} ~ ML(alpha, theta) = T_{alpha,theta}^{-alpha}.
inline double sample_ml(StableIndex alpha, double theta, RngStream& rng) {
  return std::pow(sample_poly_tilted_stable(alpha, theta, rng), -alpha.value());
}

// Paintbox: partition of [n] induced by iid draws from a truncated mass
// partition. A draw landing in the tail opens a fresh block (tail atoms are
// almost surely distinct at the tail masses used here).
inline SetPartition sample_paintbox_partition(const MassPartition& m, int n, RngStream& rng) {
  if (n < 1) throw domain_error("sample_paintbox_partition: n must be >= 1");
  std::vector<int> labels(static_cast<std::size_t>(n));
  int next_fresh = static_cast<int>(m.weights.size());
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    int idx = next_fresh;
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
      u -= m.weights[j];
      if (u <= 0.0) {
        idx = static_cast<int>(j);
        break;
      }
    }
    if (idx == next_fresh) ++next_fresh;
    labels[i] = idx;
  }
  return SetPartition::from_labels(labels);
}

// Size-biased sticks of PD(1/2 | s^{-2}/2): P_j = s^2/(s^2+S_{j-1}) - s^2/(s^2+S_j)
// with chi-square(1) increments S_j. Sticks extend lazily, so paintbox draws
// are exact (no truncation bias).
class BrownianSticks {
 public:
  explicit BrownianSticks(double s) : s2_(s * s) {
    if (!(s > 0.0)) throw domain_error("BrownianSticks: s must be > 0");
    cum_.push_back(0.0);
  }

  // Mass covered by the first j sticks: 1 - s^2/(s^2+S_j).
  double covered(std::size_t j) const { return 1.0 - s2_ / (s2_ + cum_[j]); }

  double stick(std::size_t j, RngStream& rng) {
    ensure(j, rng);
    return s2_ / (s2_ + cum_[j - 1]) - s2_ / (s2_ + cum_[j]);
  }

  SetPartition paintbox(int n, RngStream& rng) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      std::size_t j = 1;
      for (;;) {
        ensure(j, rng);
        if (covered(j) >= u) break;
        ++j;
      }
      labels[i] = static_cast<int>(j);
    }
    return SetPartition::from_labels(labels);
  }

 private:
  void ensure(std::size_t j, RngStream& rng) {
    while (cum_.size() <= j) cum_.push_back(cum_.back() + rng.chisq1());
  }

  double s2_;
  std::vector<double> cum_;
};

}  // namespace gibbspart
