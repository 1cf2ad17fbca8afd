#include <doctest.h>

#include <cmath>
#include <map>

#include "gibbspart/gibbspart.hpp"
#include "test_util.hpp"

using namespace gibbspart;

namespace {

bool refines(const SetPartition& fine, const SetPartition& coarse) {
  for (const auto& fb : fine.blocks) {
    bool inside_one = false;
    for (const auto& cb : coarse.blocks) {
      bool subset = true;
      for (int e : fb) subset = subset && std::binary_search(cb.begin(), cb.end(), e);
      inside_one = inside_one || subset;
    }
    if (!inside_one) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("FragParams validation") {
  CHECK_THROWS_AS(FragParams(StableIndex(0.3), StableIndex(0.6)), domain_error);
  CHECK_THROWS_AS(FragParams(StableIndex(0.4), StableIndex(0.4)), domain_error);
  const FragParams fp(StableIndex(0.8), StableIndex(0.4));
  CHECK(fp.ratio().value() == doctest::Approx(0.5));
}

TEST_CASE("frag_set_partition: singletons fixed, refinement, split probability") {
  RngStream rng(41, 1);
  const FragParams fp(StableIndex(0.6), StableIndex(0.3));
  {
    const SetPartition singles(4, {{1}, {2}, {3}, {4}});
    for (int i = 0; i < 20; ++i) CHECK(frag_set_partition(singles, fp, rng) == singles);
  }
  {
    for (int i = 0; i < 200; ++i) {
      const SetPartition p = sample_pd_partition(StableIndex(0.3), 0.0, 6, rng);
      const SetPartition f = frag_set_partition(p, fp, rng);
      CHECK(f.n == p.n);
      CHECK(refines(f, p));
    }
  }
  {
    // P(split {{1,2}}) = pd_eppf(0.6, -0.3, (1,1)) = 0.3/0.7
    const SetPartition pair(2, {{1, 2}});
    const long n = 100000;
    long splits = 0;
    for (long i = 0; i < n; ++i) {
      if (frag_set_partition(pair, fp, rng).num_blocks() == 2) ++splits;
    }
    const double phat = static_cast<double>(splits) / n;
    const double p0 = 0.3 / 0.7;
    CHECK(std::fabs(phat - p0) <= 3.0 * std::sqrt(p0 * (1.0 - p0) / n));
  }
}

TEST_CASE("frag duality: FRAG of PD(beta,theta) partitions follows PD(alpha,theta)") {
  const StableIndex a(0.6), b(0.3);
  const FragParams fp(a, b);
  const double theta = 0.3;
  RngStream rng(41, 2);
  auto sampler = [&](RngStream& g) {
    return frag_set_partition(sample_pd_partition(b, theta, 5, g), fp, g);
  };
  const auto rep = chi_square_vs_eppf(sampler, PdEppf(a, theta), 5, 100000, rng, "frag-duality");
  CHECK(rep.pass);
}

TEST_CASE("frag_mass_partition: conservation, first-weight oracle, diversity route") {
  RngStream rng(41, 3);
  const FragParams fp(StableIndex(0.6), StableIndex(0.3));
  {
    MassPartition m = sample_gem(0.3, 0.3, 300, rng);
    const MassPartition f = frag_mass_partition(m, fp, 300, rng);
    double total = f.tail;
    for (double w : f.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    f.validate();
  }
  {
    // m = (1.0): output is a ranked PD(alpha,-beta) mass partition
    MassPartition one;
    one.weights = {1.0};
    one.tail = 0.0;
    const long n = 4000;
    std::vector<double> via_frag(n), via_gem(n);
    for (long i = 0; i < n; ++i) {
      via_frag[static_cast<std::size_t>(i)] =
          frag_mass_partition(one, fp, 400, rng).weights[0];
      via_gem[static_cast<std::size_t>(i)] = sample_gem(0.6, -0.3, 400, rng).weights[0];
    }
    const auto ma = testutil::mean_se(via_frag);
    const auto mb = testutil::mean_se(via_gem);
    CHECK(std::fabs(ma.mean - mb.mean) <= 3.0 * std::sqrt(ma.se * ma.se + mb.se * mb.se));
  }
  {
    // fragmenting PD(beta,theta) masses yields PD(alpha,theta): its diversity
    // estimator should center on the ML(alpha,theta) mean. ML(0.6,0.3) has
    // sd ~ 0.76, so 600 draws put 3 SE at ~6.6% of the mean.
    const long n = 600;
    std::vector<double> ds(n);
    for (long i = 0; i < n; ++i) {
      MassPartition m = sample_gem(0.3, 0.3, 400, rng);
      const MassPartition f = frag_mass_partition(m, fp, 1500, rng);
      ds[static_cast<std::size_t>(i)] = diversity_estimate(f, StableIndex(0.6), 1e-5);
    }
    const auto ms = testutil::mean_se(ds);
    const double target =
        std::exp(std::lgamma(0.3 / 0.6 + 2.0) + std::lgamma(1.3) -
                 std::lgamma(0.3 / 0.6 + 1.0) - std::lgamma(0.3 + 0.6 + 1.0));
    CHECK(std::fabs(ms.mean - target) / target < 0.10);
  }
}

TEST_CASE("coag_set_partition: identities, hand example, coarsening, errors") {
  const SetPartition p(4, {{1, 3}, {2}, {4}});
  {
    const SetPartition q(3, {{1}, {2}, {3}});
    CHECK(coag_set_partition(p, q) == p);
  }
  {
    const SetPartition q(3, {{1, 2, 3}});
    CHECK(coag_set_partition(p, q) == SetPartition(4, {{1, 2, 3, 4}}));
  }
  {
    const SetPartition q(3, {{1, 2}, {3}});
    CHECK(coag_set_partition(p, q) == SetPartition(4, {{1, 2, 3}, {4}}));
  }
  {
    RngStream rng(41, 4);
    for (int i = 0; i < 100; ++i) {
      const SetPartition base = sample_pd_partition(StableIndex(0.6), 0.0, 6, rng);
      const SetPartition q = sample_pd_partition(StableIndex(0.5), 0.0, base.num_blocks(), rng);
      const SetPartition v = coag_set_partition(base, q);
      CHECK(refines(base, v));
    }
  }
  CHECK_THROWS_AS(coag_set_partition(p, SetPartition(2, {{1}, {2}})), domain_error);
}

TEST_CASE("pitdual inversion: COAG of independent PD pairs recovers PD(beta,theta)") {
  const StableIndex a(0.6), b(0.3), r(0.5);
  RngStream rng(41, 5);
  for (double theta : {0.0, 0.5}) {
    auto sampler = [&](RngStream& g) {
      const SetPartition vt = sample_pd_partition(a, theta, 5, g);
      const SetPartition q = sample_pd_partition(r, theta / 0.6, vt.num_blocks(), g);
      return coag_set_partition(vt, q);
    };
    const auto rep =
        chi_square_vs_eppf(sampler, PdEppf(b, theta), 5, 100000, rng.substream(theta == 0.0),
                           "coag-duality");
    CHECK(rep.pass);
  }
}

TEST_CASE("frag composition law at reduced scale") {
  RngStream rng(41, 6);
  const StableIndex a(0.8), s(0.4), b(0.2);
  const FragParams one(a, b), first(s, b), second(a, s);
  std::map<std::string, long> c1, c2;
  const long n = 30000;
  for (long i = 0; i < n; ++i) {
    c1[frag_set_partition(sample_pd_partition(b, 0.0, 4, rng), one, rng).rgs_key()] += 1;
    c2[frag_set_partition(frag_set_partition(sample_pd_partition(b, 0.0, 4, rng), first, rng),
                          second, rng)
           .rgs_key()] += 1;
  }
  CHECK(chi_square_two_sample(c1, n, c2, n).p_value > 0.01);
}

TEST_CASE("Law-level frag of tilted masses matches the fragmented Gibbs EPPF") {
  // paintbox partitions of fragmented PK_beta(gg) masses vs frag_eppf with the
  // generalized-gamma weight table at beta. Masses below the top 120 are
  // folded into the tail before fragmenting; their total is ~1e-4, far below
  // the chi-square resolution at this sample size.
  RngStream rng(41, 7);
  const StableIndex a(0.6), b(0.3);
  const FragParams fp(a, b);
  const TiltFunction h = TiltFunction::gg_zeta(b, 1.0, 0);
  auto truncate_masses = [](const MassPartition& m, std::size_t keep) {
    std::vector<double> w(m.weights.begin(),
                          m.weights.begin() + std::min(keep, m.weights.size()));
    double sum = 0.0;
    for (double x : w) sum += x;
    return rank_masses(std::move(w), 1.0 - sum);
  };
  auto sampler = [&](RngStream& g) {
    const PkDraw d = sample_pk_tilted(b, h, 1000, g);
    const MassPartition f = frag_mass_partition(truncate_masses(d.masses, 120), fp, 60, g);
    return sample_paintbox_partition(f, 4, g);
  };
  FragEppf target(a, GibbsWeights::gen_gamma(b, 1.0, 0, 4));
  const auto rep = chi_square_vs_eppf(sampler, target, 4, 30000, rng, "frag-gg-masses");
  CHECK(rep.pass);
}

TEST_CASE("dependent coagulation sampler: margins at reduced scale, efficiency guard") {
  const StableIndex a(0.8), b(0.4);
  {
    RngStream rng(41, 108);
    DependentCoagSampler smp(a, b, TiltFunction::unit(b), 4);
    experiments::CoagMarginChecks checks;
    for (long i = 0; i < 20000; ++i) checks.add(smp.draw(rng));
    CHECK(chi_square_gof(checks.v_tilde_counts, eppf_partition_probs(PdEppf(a, 0.0), 4), 20000)
              .p_value > 0.01);
    CHECK(chi_square_gof(checks.v_counts, eppf_partition_probs(PdEppf(b, 0.0), 4), 20000)
              .p_value > 0.01);
    CHECK(checks.q_margin(PdEppf(StableIndex(0.5), 0.0)).p_value > 0.01);
  }
  {
    RngStream rng(41, 9);
    DependentCoagSampler smp(a, b, TiltFunction::gg_zeta(b, 25.0, 0, false), 4);
    CHECK_THROWS_AS(
        [&] {
          for (int i = 0; i < 10; ++i) smp.draw(rng);
        }(),
        efficiency_error);
  }
  CHECK_THROWS_AS(DependentCoagSampler(a, b, TiltFunction::pd_theta(b, 0.4), 4), domain_error);
}

TEST_CASE("dependent coagulation with the Mittag-Leffler tilt: q block counts") {
  // P(#q = j) = sum_k B_a(n,k) B_r(k,j) E[h(Y1 Y2^{1/a})] with independent
  // Y1 ~ f^(n-ka)_{a,ka}, Y2 ~ f^(k-jr)_{r,jr}; evaluated by nested quadrature
  // in Mittag-Leffler coordinates where both factors are light-tailed.
  const double a = 0.8, b = 0.4, lam = 1.0;
  const StableIndex alpha(a), beta(b), ratio(b / a);
  const int n = 3;
  const double norm = ml_function(beta, lam);
  const StableDensity f_alpha{alpha};
  const StableDensity f_ratio{ratio};
  const BlocksTable blocks_a(alpha, n);
  const BlocksTable blocks_r(ratio, n);

  QuadOptions opt;
  opt.rel_tol = 1e-6;
  opt.abs_tol = 1e-12;
  opt.max_panels = 512;
  const double kpa = ratio.value();
  auto pair_expectation = [&](int k, int j) {
    // E[exp(-lam Y1^-b Y2^-kappa)] over w1 = Y1^-b, w2 = Y2^-kappa
    return integrate_positive_axis(
        [&](double w2) {
          const double y2 = std::pow(w2, -1.0 / kpa);
          const double g2 = tilted_y_pdf(f_ratio, k, j, y2) * std::pow(w2, -1.0 / kpa - 1.0) / kpa;
          if (g2 <= 0.0) return 0.0;
          const double inner = integrate_positive_axis(
              [&](double w1) {
                const double y1 = std::pow(w1, -1.0 / b);
                const double g1 =
                    tilted_y_pdf(f_alpha, n, k, y1) * std::pow(w1, -1.0 / b - 1.0) / b;
                return std::exp(-lam * w1 * w2) * g1;
              },
              opt, -30.0, 30.0);
          return inner * g2;
        },
        opt, -30.0, 30.0);
  };

  std::map<std::string, double> probs;
  for (int j = 1; j <= n; ++j) {
    double p = 0.0;
    for (int k = j; k <= n; ++k) {
      p += blocks_a.at(n, k) * blocks_r.at(k, j) * pair_expectation(k, j) / norm;
    }
    probs[std::to_string(j)] = p;
  }
  double total = 0.0;
  for (const auto& [key, p] : probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));

  RngStream rng(41, 11);
  DependentCoagSampler smp(alpha, beta, TiltFunction::ml_lambda(beta, lam), n);
  std::map<std::string, long> counts;
  const long draws = 30000;
  for (long i = 0; i < draws; ++i) counts[std::to_string(smp.draw(rng).q.num_blocks())] += 1;
  CHECK(chi_square_gof(counts, probs, draws).p_value > 0.01);
}

TEST_CASE("gg dual sampler margins at reduced scale") {
  RngStream rng(41, 10);
  const StableIndex a(0.6), b(0.3);
  GgDualSampler smp(b, a, 0, 4);
  experiments::CoagMarginChecks checks;
  for (long i = 0; i < 20000; ++i) checks.add(smp.draw_randomized(0.6, rng));
  CHECK(chi_square_gof(checks.v_tilde_counts, eppf_partition_probs(PdEppf(a, 0.6), 4), 20000)
            .p_value > 0.01);
  CHECK(chi_square_gof(checks.v_counts, eppf_partition_probs(PdEppf(b, 0.6), 4), 20000)
            .p_value > 0.01);
  CHECK(checks.q_margin(PdEppf(StableIndex(0.5), 1.0)).p_value > 0.01);
  CHECK_THROWS_AS(GgDualSampler(b, a, 2, 4), domain_error);
  CHECK_THROWS_AS(smp.draw_randomized(-0.5, rng), domain_error);
}
