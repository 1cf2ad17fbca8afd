#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gibbspart/errors.hpp"
#include "gibbspart/mathutil.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/special_fn.hpp"
#include "gibbspart/stable.hpp"

namespace gibbspart {

// Two-parameter Poisson-Dirichlet EPPF
//   p(n_1..n_k) = [prod_{i<k} (theta + i alpha)] / (theta+1)_{n-1} * prod_j (1-alpha)_{n_j-1};
// theta = 0 reduces to alpha^{k-1} Gamma(k)/Gamma(n) prod (1-alpha)_{n_j-1}.
inline double log_pd_eppf(StableIndex alpha, double theta, const Composition& c) {
  const double a = alpha.value();
  if (!(theta > -a)) throw domain_error("pd_eppf: need theta > -alpha");
  const int n = c.n();
  const int k = c.k();
  double lp = 0.0;
  for (int i = 1; i < k; ++i) lp += std::log(theta + i * a);
  lp -= std::lgamma(theta + n) - std::lgamma(theta + 1.0);
  for (int s : c.sizes()) lp += std::log(pochhammer(1.0 - a, s - 1));
  return lp;
}

inline double pd_eppf(StableIndex alpha, double theta, const Composition& c) {
  return std::exp(log_pd_eppf(alpha, theta, c));
}

// Block-count law P^{(n)}_{alpha,0}(k) = alpha^{k-1} Gamma(k) S_alpha(n,k) / Gamma(n).
class BlocksTable {
 public:
  BlocksTable(StableIndex alpha, int n_max)
      : alpha_(alpha), n_max_(n_max), stirling_(alpha, n_max) {
    const double a = alpha.value();
    logp_.assign(static_cast<std::size_t>(n_max) * n_max,
                 -std::numeric_limits<double>::infinity());
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        const double s = stirling_.value(n, k);
        if (!std::isfinite(s)) throw numeric_error("BlocksTable: Stirling overflow");
        logp_[idx(n, k)] =
            (k - 1) * std::log(a) + std::lgamma(k) - std::lgamma(n) + std::log(s);
      }
    }
  }

  StableIndex index() const { return alpha_; }
  int n_max() const { return n_max_; }

  double log_at(int n, int k) const {
    if (k < 1 || k > n || n > n_max_) throw domain_error("BlocksTable: need 1 <= k <= n <= n_max");
    return logp_[idx(n, k)];
  }
  double at(int n, int k) const { return std::exp(log_at(n, k)); }

 private:
  std::size_t idx(int n, int k) const {
    return static_cast<std::size_t>(n - 1) * n_max_ + (k - 1);
  }
  StableIndex alpha_;
  int n_max_;
  StirlingTable stirling_;
  std::vector<double> logp_;
};

inline double blocks_pmf(StableIndex alpha, int n, int k) {
  if (k < 1 || k > n) throw domain_error("blocks_pmf: need 1 <= k <= n");
  return BlocksTable(alpha, n).at(n, k);
}

// Closed form of P^{(k)}_{1/2,0}(j): C(2k-j-1, k-1) 2^{j+1-2k}.
inline double blocks_pmf_half(int k, int j) {
  if (j < 1 || j > k) throw domain_error("blocks_pmf_half: need 1 <= j <= k");
  return std::exp(log_binomial(2.0 * k - j - 1.0, k - 1.0) +
                  (j + 1.0 - 2.0 * k) * std::log(2.0));
}

// Mixing table Psi[n][k] = E[h(T_alpha) | K_n = k] defining a Gibbs EPPF.
// Stored in log space: the generalized-gamma tilt at large zeta produces
// weights far outside double range even though EPPF ratios stay moderate.
struct GibbsWeights {
  StableIndex alpha;
  int n_max = 0;
  std::string provenance;  // closed-form | quadrature | mixture
  std::vector<double> log_psi_table;

  GibbsWeights(StableIndex a, int nmax, std::string prov)
      : alpha(a), n_max(nmax), provenance(std::move(prov)) {
    if (nmax < 1) throw domain_error("GibbsWeights: n_max must be >= 1");
    log_psi_table.assign(static_cast<std::size_t>(nmax) * nmax, 0.0);
  }

  double& log_psi(int n, int k) {
    return log_psi_table[static_cast<std::size_t>(n - 1) * n_max + (k - 1)];
  }
  double log_psi(int n, int k) const {
    if (k < 1 || k > n || n > n_max) throw domain_error("GibbsWeights: out of table");
    return log_psi_table[static_cast<std::size_t>(n - 1) * n_max + (k - 1)];
  }
  double psi(int n, int k) const { return std::exp(log_psi(n, k)); }

  // |sum_k Psi[n][k] P^{(n)}_{alpha,0}(k) - 1| (total expectation of the unit-mean tilt).
  double normalization_defect(int n, const BlocksTable& blocks) const {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) terms.push_back(log_psi(n, k) + blocks.log_at(n, k));
    return std::fabs(std::expm1(log_sum_exp(terms)));
  }
  double max_normalization_defect() const {
    BlocksTable blocks(alpha, n_max);
    double d = 0.0;
    for (int n = 1; n <= n_max; ++n) d = std::max(d, normalization_defect(n, blocks));
    return d;
  }

  static GibbsWeights unit(StableIndex alpha, int n_max) {
    return GibbsWeights(alpha, n_max, "closed-form");
  }

  // PD(alpha,theta): Psi[n][k] = Gamma(k+theta/a) Gamma(n) Gamma(theta+1) /
  //                              (Gamma(k) Gamma(n+theta) Gamma(theta/a+1)).
  static GibbsWeights pd(StableIndex alpha, double theta, int n_max) {
    const double a = alpha.value();
    if (!(theta > -a)) throw domain_error("GibbsWeights::pd: need theta > -alpha");
    GibbsWeights w(alpha, n_max, "closed-form");
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        w.log_psi(n, k) = std::lgamma(k + theta / a) + std::lgamma(n) + std::lgamma(theta + 1.0) -
                          std::lgamma(k) - std::lgamma(n + theta) - std::lgamma(theta / a + 1.0);
      }
    }
    return w;
  }

  // Generalized-gamma tilt r^[m]_{a,zeta}(t) = t^m e^{-zeta^{1/a} t} / E[T^m e^{-zeta^{1/a} T}],
  // m in {0,1}. Entries reduce to one-dimensional integrals
  //   W_p = (1/a) Int_0^inf ((zeta+r)^{1/a} - zeta^{1/a})^p (zeta+r)^{k-(n-1)/a-1} e^{-r} dr
  // evaluated in log space (substitution w = (lambda+u)^a = zeta + r of the
  // size-biased Laplace exponent; exact e^{-r} damping, no overflow).
  static GibbsWeights gen_gamma(StableIndex alpha, double zeta, int m, int n_max) {
    if (!(zeta > 0.0)) throw domain_error("GibbsWeights::gen_gamma: zeta must be > 0");
    if (m != 0 && m != 1) throw domain_error("GibbsWeights::gen_gamma: m must be 0 or 1");
    const double a = alpha.value();
    GibbsWeights w(alpha, n_max, "quadrature");
    const double log_lambda = std::log(zeta) / a;
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        if (m == 0) {
          w.log_psi(n, k) =
              std::log(a) + log_w_integral(a, zeta, n - 1, k - (n - 1.0) / a - 1.0) -
              std::lgamma(k);
        } else {
          if (n == 1) {
            w.log_psi(n, k) = 0.0;  // unit-mean tilt
          } else {
            w.log_psi(n, k) = (1.0 - a) * log_lambda + std::log(n - 1.0) +
                              log_w_integral(a, zeta, n - 2, k - (n - 1.0) / a - 1.0) -
                              std::lgamma(k);
          }
        }
      }
    }
    return w;
  }

  // Mittag-Leffler tilt h(t) = e^{-lambda t^-a} / E_{a,1}(-lambda):
  //   Psi[n][k] E_{a,1}(-lambda) = sum_l (-lambda)^l (k)_l Gamma(n) / (l! Gamma(n + a l)).
  static GibbsWeights mittag_leffler(StableIndex alpha, double lambda, int n_max,
                                     const DensityEvalConfig& cfg = {}) {
    if (!(lambda >= 0.0)) throw domain_error("GibbsWeights::mittag_leffler: lambda must be >= 0");
    const double a = alpha.value();
    const double log_norm = std::log(ml_function(alpha, lambda, cfg));
    GibbsWeights w(alpha, n_max, "closed-form");
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        double max_term = 0.0;
        int settled = 0;
        for (int l = 0; l <= cfg.max_terms; ++l) {
          double lmag = std::lgamma(n) - std::lgamma(n + a * l) + std::lgamma(k + l) -
                        std::lgamma(k) - std::lgamma(l + 1.0);
          if (l > 0) lmag += l * std::log(lambda);
          if (lambda == 0.0 && l > 0) break;
          const double term = ((l % 2 == 0) ? 1.0 : -1.0) * std::exp(lmag);
          sum += term;
          max_term = std::max(max_term, std::fabs(term));
          if (std::fabs(term) < 1e-16 * std::fabs(sum) + 1e-300) {
            if (++settled >= 2) break;
          } else {
            settled = 0;
          }
          if (l == cfg.max_terms) {
            throw numeric_error("GibbsWeights::mittag_leffler: series stalled", sum);
          }
        }
        if (!(sum > 0.0) || max_term > 1e13 * sum) {
          throw numeric_error("GibbsWeights::mittag_leffler: cancellation", sum);
        }
        w.log_psi(n, k) = std::log(sum) - log_norm;
      }
    }
    return w;
  }

  // Arbitrary tilt via the quadrature Psi[n][k] = Int h(t) f^(n-ka)_{a,ka}(t) dt.
  static GibbsWeights from_tilt(const StableDensity& f, const std::function<double(double)>& h,
                                int n_max, double rel_tol = 1e-9) {
    GibbsWeights w(f.index(), n_max, "quadrature");
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        const double psi = psi_weight(f, h, n, k, rel_tol);
        if (!(psi > 0.0)) throw numeric_error("GibbsWeights::from_tilt: nonpositive weight");
        w.log_psi(n, k) = std::log(psi);
      }
    }
    return w;
  }

 private:
  static double log_w_integral(double beta, double zeta, int p, double cexp) {
    const double log_zeta = std::log(zeta);
    auto log_d = [&](double r) {
      // log[(zeta+r)^{1/beta} - zeta^{1/beta}] without cancellation.
      const double u = (log_zeta - std::log(zeta + r)) / beta;
      return std::log(zeta + r) / beta + std::log(-std::expm1(u));
    };
    auto phi = [&](double r) {
      double v = cexp * std::log(zeta + r) - r;
      if (p > 0) v += p * log_d(r);
      return v;
    };
    // Locate the mode on a log-spaced probe grid, then integrate exp(phi - M).
    double best_r = 1.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 160; ++i) {
      const double r = std::exp(-27.0 + i * (27.0 + std::log(700.0)) / 160.0);
      const double v = phi(r);
      if (v > best) {
        best = v;
        best_r = r;
      }
    }
    const double M = best;
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-16;
    opt.max_panels = 1024;
    // Split at the mode so the adaptive rule sees two monotone-ish pieces.
    auto g = [&](double r) {
      const double v = phi(r) - M;
      return v < -746.0 ? 0.0 : std::exp(v);
    };
    const double upper = std::max(700.0, best_r * 4.0);
    double integral = integrate(g, 0.0, best_r, opt) + integrate(g, best_r, upper, opt);
    return M + std::log(integral) - std::log(beta);
  }
};

// Exchangeable partition probability function, evaluated in log space.
class Eppf {
 public:
  virtual ~Eppf() = default;
  virtual double log_eval(const Composition& c) const = 0;
  virtual int n_max() const { return kEnumerationCap; }
  double eval(const Composition& c) const { return std::exp(log_eval(c)); }
  double operator()(const Composition& c) const { return eval(c); }
};

class PdEppf final : public Eppf {
 public:
  PdEppf(StableIndex alpha, double theta) : alpha_(alpha), theta_(theta) {
    if (!(theta > -alpha.value())) throw domain_error("PdEppf: need theta > -alpha");
  }
  double log_eval(const Composition& c) const override {
    return log_pd_eppf(alpha_, theta_, c);
  }
  int n_max() const override { return 1 << 20; }
  StableIndex alpha() const { return alpha_; }
  double theta() const { return theta_; }

 private:
  StableIndex alpha_;
  double theta_;
};

// Gibbs EPPF: Psi[n][k] * pd_eppf(alpha, 0, c).
class GibbsEppf final : public Eppf {
 public:
  explicit GibbsEppf(GibbsWeights w) : w_(std::move(w)) {}
  double log_eval(const Composition& c) const override {
    if (c.n() > w_.n_max) throw domain_error("GibbsEppf: composition exceeds weight table");
    return w_.log_psi(c.n(), c.k()) + log_pd_eppf(w_.alpha, 0.0, c);
  }
  int n_max() const override { return w_.n_max; }
  const GibbsWeights& weights() const { return w_; }

 private:
  GibbsWeights w_;
};

// Table of log R(n,k) = log[f^(n-k b)_{b,kb}(y) / f_b(y)] for one fixed y.
// rel_tol trades table accuracy for speed: evaluator-side probabilities keep
// the default, per-draw sampler tables can afford 1e-6.
class TiltedRatioTable {
 public:
  TiltedRatioTable(StableDensityPtr f, double y, int n_max, double rel_tol = 1e-10)
      : f_(std::move(f)), y_(y), n_max_(n_max) {
    if (!(y > 0.0)) throw domain_error("TiltedRatioTable: y must be > 0");
    const double fy = (*f_)(y);
    if (!(fy > 0.0)) throw numeric_error("TiltedRatioTable: f_beta(y) underflowed");
    const double lfy = std::log(fy);
    logr_.assign(static_cast<std::size_t>(n_max) * n_max,
                 -std::numeric_limits<double>::infinity());
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 1; k <= n; ++k) {
        const double td = tilted_y_pdf(*f_, n, k, y_, rel_tol);
        logr_[idx(n, k)] = (td > 0.0 ? std::log(td) : -std::numeric_limits<double>::infinity()) - lfy;
      }
    }
  }

  StableIndex index() const { return f_->index(); }
  double y() const { return y_; }
  int n_max() const { return n_max_; }
  double log_at(int n, int k) const {
    if (k < 1 || k > n || n > n_max_) throw domain_error("TiltedRatioTable: out of table");
    return logr_[idx(n, k)];
  }
  double at(int n, int k) const { return std::exp(log_at(n, k)); }

 private:
  std::size_t idx(int n, int k) const {
    return static_cast<std::size_t>(n - 1) * n_max_ + (k - 1);
  }
  StableDensityPtr f_;
  double y_;
  int n_max_;
  std::vector<double> logr_;
};

// PD(beta|y)-EPPF: [f^(n-kb)_{b,kb}(y)/f_b(y)] * pd_eppf(beta, 0, c).
class CondEppf final : public Eppf {
 public:
  CondEppf(StableDensityPtr f, double y, int n_max, double rel_tol = 1e-10)
      : table_(std::move(f), y, n_max, rel_tol) {}
  double log_eval(const Composition& c) const override {
    return table_.log_at(c.n(), c.k()) + log_pd_eppf(table_.index(), 0.0, c);
  }
  int n_max() const override { return table_.n_max(); }
  const TiltedRatioTable& table() const { return table_; }

 private:
  TiltedRatioTable table_;
};

// PD_{alpha|beta}(alpha|y)-EPPF of the fragmented conditional partition:
//   [sum_j P^{(k)}_{b/a,0}(j) f^(n-jb)_{b,jb}(y)/f_b(y)] * pd_eppf(alpha, 0, c).
class FragCondEppf final : public Eppf {
 public:
  FragCondEppf(StableIndex alpha, StableDensityPtr f_beta, double y, int n_max)
      : alpha_(alpha),
        ratio_(std::move(f_beta), y, n_max),
        blocks_ratio_(make_ratio_index(alpha, ratio_.index()), n_max) {}

  double log_eval(const Composition& c) const override {
    const int n = c.n();
    const int k = c.k();
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
      terms.push_back(blocks_ratio_.log_at(k, j) + ratio_.log_at(n, j));
    }
    return log_sum_exp(terms) + log_pd_eppf(alpha_, 0.0, c);
  }
  int n_max() const override { return ratio_.n_max(); }
  StableIndex alpha() const { return alpha_; }
  const TiltedRatioTable& ratio() const { return ratio_; }
  const BlocksTable& blocks_ratio() const { return blocks_ratio_; }

  static StableIndex make_ratio_index(StableIndex alpha, StableIndex beta) {
    if (!(beta.value() < alpha.value())) throw domain_error("FragCondEppf: need beta < alpha");
    return StableIndex(beta.value() / alpha.value());
  }

 private:
  StableIndex alpha_;
  TiltedRatioTable ratio_;
  BlocksTable blocks_ratio_;
};

// PK_alpha(h~_{b/a} f_alpha)-EPPF of a fragmented PK_beta(h f_beta) law:
//   [sum_j P^{(k)}_{b/a,0}(j) Psi^[beta]_{n,j}] * pd_eppf(alpha, 0, c).
class FragEppf final : public Eppf {
 public:
  FragEppf(StableIndex alpha, GibbsWeights psi_beta)
      : alpha_(alpha),
        psi_beta_(std::move(psi_beta)),
        blocks_ratio_(FragCondEppf::make_ratio_index(alpha, psi_beta_.alpha),
                      psi_beta_.n_max) {}

  double log_eval(const Composition& c) const override {
    const int n = c.n();
    const int k = c.k();
    if (n > psi_beta_.n_max) throw domain_error("FragEppf: composition exceeds weight table");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
      terms.push_back(blocks_ratio_.log_at(k, j) + psi_beta_.log_psi(n, j));
    }
    return log_sum_exp(terms) + log_pd_eppf(alpha_, 0.0, c);
  }
  int n_max() const override { return psi_beta_.n_max; }

 private:
  StableIndex alpha_;
  GibbsWeights psi_beta_;
  BlocksTable blocks_ratio_;
};

// Single-value helpers (no table reuse); convenient inside quadratures.
inline double cond_eppf(const StableDensity& f_beta, double y, const Composition& c) {
  const double fy = f_beta(y);
  if (!(fy > 0.0)) return 0.0;
  return tilted_y_pdf(f_beta, c.n(), c.k(), y) / fy * pd_eppf(f_beta.index(), 0.0, c);
}

inline double frag_cond_eppf(StableIndex alpha, const StableDensity& f_beta, double y,
                             const Composition& c) {
  const double fy = f_beta(y);
  if (!(fy > 0.0)) return 0.0;
  const StableIndex ratio = FragCondEppf::make_ratio_index(alpha, f_beta.index());
  const int n = c.n();
  const int k = c.k();
  BlocksTable blocks(ratio, k);
  double mix = 0.0;
  for (int j = 1; j <= k; ++j) {
    mix += blocks.at(k, j) * tilted_y_pdf(f_beta, n, j, y) / fy;
  }
  return mix * pd_eppf(alpha, 0.0, c);
}

// P(K_n = k | T_beta = y) for the fragmented conditional law: the same
// mixture over merged-block counts, against blocks_pmf(alpha, n, k).
inline double cond_blocks_pmf(StableIndex alpha, const StableDensity& f_beta, double y, int n,
                              int k) {
  if (k < 1 || k > n) throw domain_error("cond_blocks_pmf: need 1 <= k <= n");
  const double fy = f_beta(y);
  if (!(fy > 0.0)) return 0.0;
  const StableIndex ratio = FragCondEppf::make_ratio_index(alpha, f_beta.index());
  BlocksTable blocks(ratio, k);
  double mix = 0.0;
  for (int j = 1; j <= k; ++j) {
    mix += blocks.at(k, j) * tilted_y_pdf(f_beta, n, j, y) / fy;
  }
  return mix * blocks_pmf(alpha, n, k);
}

// Sequential prediction rule: probabilities of joining each existing block or
// opening a new one, as EPPF ratios. Sums to one by EPPF consistency.
inline std::vector<double> predictive_weights(const Eppf& eppf, const SetPartition& p) {
  const Composition c = p.composition();
  const double le0 = eppf.log_eval(c);
  if (!std::isfinite(le0)) throw domain_error("predictive_weights: EPPF vanishes at base partition");
  std::vector<double> w;
  w.reserve(p.blocks.size() + 1);
  std::map<int, double> by_size;
  for (const auto& b : p.blocks) {
    const int s = static_cast<int>(b.size());
    auto it = by_size.find(s);
    if (it == by_size.end()) {
      const double v = std::exp(eppf.log_eval(c.with_incremented(s)) - le0);
      it = by_size.emplace(s, v).first;
    }
    w.push_back(it->second);
  }
  w.push_back(std::exp(eppf.log_eval(c.with_new_singleton()) - le0));
  return w;
}

}  // namespace gibbspart
