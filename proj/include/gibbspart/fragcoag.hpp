#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gibbspart/eppf.hpp"
#include "gibbspart/errors.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/rng.hpp"
#include "gibbspart/samplers.hpp"

namespace gibbspart {

struct FragParams {
  StableIndex alpha;
  StableIndex beta;

  FragParams(StableIndex a, StableIndex b) : alpha(a), beta(b) {
    if (!(beta.value() < alpha.value())) throw domain_error("FragParams: need 0 < beta < alpha < 1");
  }
  StableIndex ratio() const { return StableIndex(beta.value() / alpha.value()); }
};

// FRAG_{alpha,-beta} on partitions of [n]: shatter each block by an
// independent PD(alpha,-beta) partition of its elements.
inline SetPartition frag_set_partition(const SetPartition& p, const FragParams& fp,
                                       RngStream& rng) {
  p.validate();
  std::vector<std::vector<int>> out;
  for (const auto& block : p.blocks) {
    const int m = static_cast<int>(block.size());
    if (m == 1) {
      out.push_back(block);
      continue;
    }
    const SetPartition sub =
        sample_pd_partition(fp.alpha, -fp.beta.value(), m, rng);
    for (const auto& sb : sub.blocks) {
      std::vector<int> nb;
      nb.reserve(sb.size());
      for (int pos : sb) nb.push_back(block[static_cast<std::size_t>(pos - 1)]);
      out.push_back(std::move(nb));
    }
  }
  return SetPartition(p.n, std::move(out));
}

// FRAG_{alpha,-beta} on truncated mass partitions: multiply each mass into an
// independent GEM(alpha,-beta) stick sequence, pool and rank. Input tail and
// per-mass stick tails compound into the output tail.
inline MassPartition frag_mass_partition(const MassPartition& m, const FragParams& fp,
                                         int sticks_per_mass, RngStream& rng) {
  m.validate();
  if (sticks_per_mass < 1) throw domain_error("frag_mass_partition: sticks_per_mass must be >= 1");
  std::vector<double> pooled;
  pooled.reserve(m.weights.size() * static_cast<std::size_t>(sticks_per_mass));
  double tail = m.tail;
  for (double w : m.weights) {
    GemDraw g = sample_gem_sticks(fp.alpha.value(), -fp.beta.value(), sticks_per_mass, rng);
    for (double s : g.sticks) pooled.push_back(w * s);
    tail += w * g.tail;
  }
  return rank_masses(std::move(pooled), tail);
}

// COAG: merge the blocks of p whose indices share a block of q (q partitions
// [#blocks(p)]); the paint-box composition of exchangeable bridges.
inline SetPartition coag_set_partition(const SetPartition& p, const SetPartition& q) {
  p.validate();
  q.validate();
  if (q.n != p.num_blocks()) {
    throw domain_error("coag_set_partition: q must partition [#blocks(p)]");
  }
  std::vector<std::vector<int>> out;
  out.reserve(q.blocks.size());
  for (const auto& qb : q.blocks) {
    std::vector<int> merged;
    for (int idx : qb) {
      const auto& pb = p.blocks[static_cast<std::size_t>(idx - 1)];
      merged.insert(merged.end(), pb.begin(), pb.end());
    }
    out.push_back(std::move(merged));
  }
  return SetPartition(p.n, std::move(out));
}

struct DependentCoagDraw {
  SetPartition v_tilde;  // partition of [n], k blocks
  SetPartition q;        // partition of [k]
  SetPartition v;        // coagulated partition of [n]
  double s = 0.0;        // latent T_alpha coordinate
  double y = 0.0;        // latent T_{beta/alpha} coordinate
};

// Dependent coagulation pair (v_tilde, q) under the joint law P^{b/a}_a(h):
// draw (s,y) from the tilted product density h(s y^{1/a}) f_a(s) f_{b/a}(y) by
// rejection, then v_tilde | s ~ PD(alpha|s) on [n] and q | y ~ PD(b/a|y) on
// [k]. The coagulation v then has the PK_beta(h f_beta) partition law.
class DependentCoagSampler {
 public:
  DependentCoagSampler(StableIndex alpha, StableIndex beta, TiltFunction h, int n,
                       DensityEvalConfig cfg = {})
      : params_(alpha, beta),
        h_(std::move(h)),
        n_(n),
        f_alpha_(make_stable_density(alpha, cfg)),
        f_ratio_(make_stable_density(params_.ratio(), cfg)) {
    if (!h_.sup_bound) throw domain_error("DependentCoagSampler: tilt must carry sup_bound");
    if (n < 1) throw domain_error("DependentCoagSampler: n must be >= 1");
  }

  DependentCoagDraw draw(RngStream& rng) {
    const double a = params_.alpha.value();
    const double sup = *h_.sup_bound;
    DependentCoagDraw d;
    for (;;) {
      d.s = sample_stable(params_.alpha, rng);
      d.y = sample_stable(params_.ratio(), rng);
      ++trials_;
      if (rng.uniform01() <= h_.eval(d.s * std::pow(d.y, 1.0 / a)) / sup) break;
      if (trials_ >= 20000 && accepts_ == 0) {
        throw efficiency_error("DependentCoagSampler: acceptance below 1e-4");
      }
    }
    ++accepts_;
    CondEppf cond_v(f_alpha_, d.s, n_, kSamplerTol);
    d.v_tilde = sample_eppf_partition(cond_v, n_, rng);
    const int k = d.v_tilde.num_blocks();
    CondEppf cond_q(f_ratio_, d.y, k, kSamplerTol);
    d.q = sample_eppf_partition(cond_q, k, rng);
    d.v = coag_set_partition(d.v_tilde, d.q);
    return d;
  }

  // Per-draw tables only steer the sequential sampler; 1e-6 relative error in
  // the predictive weights is invisible at any feasible Monte Carlo size.
  static constexpr double kSamplerTol = 1e-6;

  double acceptance_rate() const {
    return trials_ == 0 ? 1.0 : static_cast<double>(accepts_) / static_cast<double>(trials_);
  }

 private:
  FragParams params_;
  TiltFunction h_;
  int n_;
  StableDensityPtr f_alpha_;
  StableDensityPtr f_ratio_;
  long trials_ = 0;
  long accepts_ = 0;
};

// Explicit generalized-gamma dependent pair of Section-6 type: q's inverse
// local time y ~ r^[m]_{b/a,zeta} f_{b/a}, v_tilde | y ~ P^[m]_alpha(zeta^{a/b} y)
// on [n], q | y ~ PD(b/a|y) on [k], v = coag(v_tilde, q) ~ P^[m]_beta(zeta).
// Randomizing zeta ~ Gamma(theta/b) (m=0, theta>0) or Gamma((theta+b)/b)
// (m=1, theta>-b) recovers PD(alpha,theta) independent of PD(b/a,theta/a).
class GgDualSampler {
 public:
  GgDualSampler(StableIndex beta, StableIndex alpha, int m, int n, DensityEvalConfig cfg = {})
      : params_(alpha, beta),
        m_(m),
        n_(n),
        f_ratio_(make_stable_density(params_.ratio(), cfg)) {
    if (m != 0 && m != 1) throw domain_error("GgDualSampler: m must be 0 or 1");
    if (n < 1) throw domain_error("GgDualSampler: n must be >= 1");
  }

  DependentCoagDraw draw_fixed(double zeta, RngStream& rng) {
    if (!(zeta > 0.0)) throw domain_error("GgDualSampler: zeta must be > 0");
    const double a = params_.alpha.value();
    const double b = params_.beta.value();
    DependentCoagDraw d;
    d.y = sample_gg_inverse_lt(params_.ratio(), zeta, m_, rng);
    const double zeta_prime = std::pow(zeta, a / b) * d.y;
    GibbsEppf tilted(GibbsWeights::gen_gamma(params_.alpha, zeta_prime, m_, n_));
    d.v_tilde = sample_eppf_partition(tilted, n_, rng);
    const int k = d.v_tilde.num_blocks();
    CondEppf cond_q(f_ratio_, d.y, k, DependentCoagSampler::kSamplerTol);
    d.q = sample_eppf_partition(cond_q, k, rng);
    d.v = coag_set_partition(d.v_tilde, d.q);
    return d;
  }

  // Gamma-randomized zeta; valid for theta > 0 when m = 0 and theta > -beta
  // when m = 1.
  DependentCoagDraw draw_randomized(double theta, RngStream& rng) {
    const double b = params_.beta.value();
    const double shape = (m_ == 0) ? theta / b : (theta + b) / b;
    if (!(shape > 0.0)) throw domain_error("GgDualSampler: theta outside randomization range");
    const double zeta = rng.gamma(shape);
    return draw_fixed(zeta, rng);
  }

  const FragParams& params() const { return params_; }
  int m() const { return m_; }

 private:
  FragParams params_;
  int m_;
  int n_;
  StableDensityPtr f_ratio_;
};

}  // namespace gibbspart
