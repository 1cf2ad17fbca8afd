#include <doctest.h>

#include <cmath>
#include <memory>

#include "gibbspart/gibbspart.hpp"
#include "test_util.hpp"

using namespace gibbspart;

namespace {

// EPPF addition rule p(c) = sum_blocks p(c with n_j + 1) + p(c + singleton).
double addition_rule_defect(const Eppf& e, int n_top) {
  double defect = 0.0;
  for (int n = 1; n < n_top; ++n) {
    enumerate_set_partitions(n, [&](const SetPartition& p) {
      const Composition c = p.composition();
      double sum = e.eval(c.with_new_singleton());
      for (int s : c.sizes()) sum += e.eval(c.with_incremented(s));
      defect = std::max(defect, std::fabs(sum - e.eval(c)));
    });
  }
  return defect;
}

}  // namespace

TEST_CASE("pd_eppf: frozen values and domain") {
  CHECK(pd_eppf(StableIndex(0.3), 0.0, Composition({1, 1})) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(pd_eppf(StableIndex(0.3), 0.0, Composition({2})) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(pd_eppf(StableIndex(0.5), 0.0, Composition({2, 1})) ==
        doctest::Approx(0.125).epsilon(1e-14));
  CHECK_THROWS_AS(pd_eppf(StableIndex(0.5), -0.5, Composition({2, 1})), domain_error);
  // theta = -beta stays inside the domain for beta < alpha
  CHECK(pd_eppf(StableIndex(0.6), -0.3, Composition({1, 1})) ==
        doctest::Approx(0.3 / 0.7).epsilon(1e-12));
}

TEST_CASE("pd_eppf symmetry in the block sizes") {
  const StableIndex a(0.62);
  const double v1 = pd_eppf(a, 0.4, Composition({3, 1, 2}));
  const double v2 = pd_eppf(a, 0.4, Composition({1, 2, 3}));
  const double v3 = pd_eppf(a, 0.4, Composition({2, 3, 1}));
  CHECK(v1 == v2);
  CHECK(v2 == v3);
}

TEST_CASE("blocks_pmf: frozen values, totals and the enumeration oracle") {
  const StableIndex half(0.5);
  CHECK(blocks_pmf(half, 3, 3) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(blocks_pmf(half, 3, 1) == doctest::Approx(0.375).epsilon(1e-13));
  CHECK_THROWS_AS(blocks_pmf(half, 3, 4), domain_error);

  double total = 0.0;
  for (int k = 1; k <= 6; ++k) total += blocks_pmf(StableIndex(0.7), 6, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  // brute force: aggregate pd_eppf(alpha, 0) over partitions with k blocks
  for (double a : {0.4, 0.7}) {
    const StableIndex alpha(a);
    for (int n = 2; n <= 6; ++n) {
      std::vector<double> by_k(static_cast<std::size_t>(n) + 1, 0.0);
      enumerate_set_partitions(n, [&](const SetPartition& p) {
        by_k[static_cast<std::size_t>(p.num_blocks())] += pd_eppf(alpha, 0.0, p.composition());
      });
      for (int k = 1; k <= n; ++k) {
        CHECK(blocks_pmf(alpha, n, k) == doctest::Approx(by_k[k]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("blocks_pmf_half equals the half-index block law") {
  CHECK(blocks_pmf_half(1, 1) == doctest::Approx(1.0));
  CHECK(blocks_pmf_half(2, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(blocks_pmf_half(2, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(blocks_pmf_half(2, 3), domain_error);
  const StableIndex half(0.5);
  BlocksTable table(half, 12);
  for (int k = 1; k <= 12; ++k) {
    for (int j = 1; j <= k; ++j) {
      CHECK(blocks_pmf_half(k, j) == doctest::Approx(table.at(k, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("GibbsWeights: unit row, mixture normalization, provenance") {
  for (double a : {0.3, 0.6, 0.8}) {
    const StableIndex alpha(a);
    std::vector<GibbsWeights> tables;
    tables.push_back(GibbsWeights::pd(alpha, 0.7, 10));
    tables.push_back(GibbsWeights::pd(alpha, -0.25 * a, 10));
    tables.push_back(GibbsWeights::gen_gamma(alpha, 0.5, 0, 10));
    tables.push_back(GibbsWeights::gen_gamma(alpha, 2.0, 1, 10));
    tables.push_back(GibbsWeights::mittag_leffler(alpha, 1.0, 10));
    for (const auto& w : tables) {
      CHECK(w.psi(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(w.max_normalization_defect() <= 1e-8);
    }
  }
  CHECK(GibbsWeights::pd(StableIndex(0.5), 1.0, 4).provenance == "closed-form");
  CHECK(GibbsWeights::gen_gamma(StableIndex(0.5), 1.0, 0, 4).provenance == "quadrature");
}

TEST_CASE("GibbsWeights closed/fast routes match the psi_weight quadrature oracle") {
  const StableIndex a(0.6);
  const StableDensity f{a};
  // generalized gamma, m = 0 and m = 1
  for (int m : {0, 1}) {
    const double zeta = 1.0;
    const double lam = std::pow(zeta, 1.0 / 0.6);
    const GibbsWeights w = GibbsWeights::gen_gamma(a, zeta, m, 6);
    std::function<double(double)> h;
    if (m == 0) {
      h = [=](double t) { return std::exp(zeta - lam * t); };
    } else {
      const double c = std::pow(zeta, 1.0 / 0.6 - 1.0) / 0.6;
      h = [=](double t) { return c * t * std::exp(zeta - lam * t); };
    }
    for (const auto& [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {4, 2}, {6, 5}}) {
      CHECK(w.psi(n, k) == doctest::Approx(psi_weight(f, h, n, k)).epsilon(1e-6));
    }
  }
  // Mittag-Leffler tilt
  {
    const double lam = 1.0;
    const double norm = ml_function(a, lam);
    const GibbsWeights w = GibbsWeights::mittag_leffler(a, lam, 6);
    auto h = [=](double t) { return std::exp(-lam * std::pow(t, -0.6)) / norm; };
    for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {4, 2}, {6, 6}}) {
      CHECK(w.psi(n, k) == doctest::Approx(psi_weight(f, h, n, k)).epsilon(1e-6));
    }
  }
  // from_tilt generic builder agrees with the gg closed route
  {
    const GibbsWeights direct = GibbsWeights::gen_gamma(a, 1.0, 0, 4);
    const double lam = std::pow(1.0, 1.0 / 0.6);
    const GibbsWeights generic = GibbsWeights::from_tilt(
        f, [=](double t) { return std::exp(1.0 - lam * t); }, 4);
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= n; ++k) {
        CHECK(generic.psi(n, k) == doctest::Approx(direct.psi(n, k)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("gibbs_eppf: unit weights reduce to pd_eppf(alpha, 0)") {
  const StableIndex a(0.7);
  GibbsEppf ge(GibbsWeights::unit(a, 8));
  enumerate_set_partitions(5, [&](const SetPartition& p) {
    const Composition c = p.composition();
    CHECK(ge.eval(c) == doctest::Approx(pd_eppf(a, 0.0, c)).epsilon(1e-13));
  });
  CHECK_THROWS_AS(ge.eval(Composition({5, 4})), domain_error);
}

TEST_CASE("gibbs_eppf: enumeration total and the PD reduction") {
  const StableIndex a(0.6);
  GibbsEppf gg(GibbsWeights::gen_gamma(a, 1.0, 0, 6));
  CHECK(eppf_total_mass(gg, 5) == doctest::Approx(1.0).epsilon(1e-8));

  const StableIndex half(0.5);
  GibbsEppf pd_w(GibbsWeights::pd(half, 1.0, 6));
  const Composition c({3, 1});
  CHECK(pd_w.eval(c) == doctest::Approx(pd_eppf(half, 1.0, c)).epsilon(1e-10));
}

TEST_CASE("cond_eppf: totals, Hermite form, disintegration") {
  auto f_half = make_stable_density(StableIndex(0.5));
  CondEppf ce(f_half, 1.3, 6);
  CHECK(eppf_total_mass(ce, 4) == doctest::Approx(1.0).epsilon(1e-6));

  // Hermite closed form at (n,k) = (3,2), s = 1
  {
    const double s = 1.0;
    const double y = 0.5 / (s * s);
    const Composition c({2, 1});
    const double closed = std::pow(s, 2 - 1) * hermite_fn((2.0 * 3 - 2 - 1.0) / 2.0, s) *
                          std::exp(std::lgamma(3) + 2.0 * std::log(2.0) - std::lgamma(2)) *
                          pd_eppf(StableIndex(0.5), 0.0, c);
    CHECK(cond_eppf(*f_half, y, c) == doctest::Approx(closed).epsilon(1e-8));
  }

  // disintegration over the mixing law at beta = 0.4
  {
    const StableDensity f{StableIndex(0.4)};
    const Composition c({2, 1});
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    opt.max_panels = 2048;
    const double integral =
        integrate_positive_axis([&](double y) { return cond_eppf(f, y, c) * f(y); }, opt);
    CHECK(integral == doctest::Approx(pd_eppf(StableIndex(0.4), 0.0, c)).epsilon(1e-6));
  }
}

TEST_CASE("frag_cond_eppf: totals, single-block collapse, Hermite mixture") {
  auto f_beta = make_stable_density(StableIndex(0.4));
  FragCondEppf fce(StableIndex(0.8), f_beta, 1.0, 6);
  CHECK(eppf_total_mass(fce, 4) == doctest::Approx(1.0).epsilon(1e-5));

  // k = 1 collapses: the mixing sum over one block is the tilted ratio itself
  {
    const Composition c({4});
    const double direct = tilted_y_pdf(*f_beta, 4, 1, 1.0) / (*f_beta)(1.0) *
                          pd_eppf(StableIndex(0.8), 0.0, c);
    CHECK(fce.eval(c) == doctest::Approx(direct).epsilon(1e-10));
  }

  // mixture of Hermite functions: beta = 1/2 fixed, mixing index 1/(2 alpha)
  {
    const double a = 0.8, s = 1.0;
    const double y = 0.5 / (s * s);
    auto f_half = make_stable_density(StableIndex(0.5));
    const int n = 3, k = 2;
    const Composition c({2, 1});
    const BlocksTable mix(StableIndex(0.5 / a), k);
    double mixture = 0.0;
    for (int j = 1; j <= k; ++j) {
      mixture += mix.at(k, j) * std::pow(2.0, n - 1) * std::pow(s, j - 1) *
                 hermite_fn((2.0 * n - j - 1.0) / 2.0, s) *
                 std::exp(std::lgamma(n) - std::lgamma(j));
    }
    CHECK(frag_cond_eppf(StableIndex(a), *f_half, y, c) ==
          doctest::Approx(mixture * pd_eppf(StableIndex(a), 0.0, c)).epsilon(1e-8));
  }
}

TEST_CASE("frag_eppf: collapse, Pitman identity, enumeration total") {
  const StableIndex a(0.6), b(0.3);
  // unit weights collapse to pd_eppf(alpha, 0)
  {
    FragEppf fe(a, GibbsWeights::unit(b, 6));
    enumerate_set_partitions(4, [&](const SetPartition& p) {
      const Composition c = p.composition();
      CHECK(fe.eval(c) == doctest::Approx(pd_eppf(a, 0.0, c)).epsilon(1e-12));
    });
  }
  // PD(beta,theta) weights reproduce pd_eppf(alpha,theta) exactly
  {
    FragEppf fe(a, GibbsWeights::pd(b, 0.3, 6));
    enumerate_set_partitions(5, [&](const SetPartition& p) {
      const Composition c = p.composition();
      CHECK(fe.eval(c) == doctest::Approx(pd_eppf(a, 0.3, c)).epsilon(1e-8));
    });
  }
  // generalized-gamma weights: total mass one
  {
    FragEppf fe(a, GibbsWeights::gen_gamma(b, 1.0, 0, 6));
    CHECK(eppf_total_mass(fe, 5) == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(FragEppf(StableIndex(0.3), GibbsWeights::unit(StableIndex(0.6), 6)),
                  domain_error);
}

TEST_CASE("cond_blocks_pmf: totals, n=1, cross-check against frag_cond_eppf") {
  const StableDensity f{StableIndex(0.4)};
  const StableIndex a(0.8);
  double total = 0.0;
  for (int k = 1; k <= 5; ++k) total += cond_blocks_pmf(a, f, 1.0, 5, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(cond_blocks_pmf(a, f, 1.0, 1, 1) == doctest::Approx(1.0).epsilon(1e-10));

  // summing the EPPF over partitions with k blocks reproduces the pmf
  std::vector<double> by_k(5, 0.0);
  auto fp = make_stable_density(StableIndex(0.4));
  FragCondEppf fce(a, fp, 1.0, 4);
  enumerate_set_partitions(4, [&](const SetPartition& p) {
    by_k[static_cast<std::size_t>(p.num_blocks())] += fce.eval(p.composition());
  });
  for (int k = 1; k <= 4; ++k) {
    CHECK(cond_blocks_pmf(a, f, 1.0, 4, k) == doctest::Approx(by_k[k]).epsilon(1e-8));
  }
}

TEST_CASE("predictive_weights: seating rule, consistency, positivity") {
  // PD(alpha, theta) on {{1}}: ((1-a)/(1+th), (th+a)/(1+th))
  {
    PdEppf pe(StableIndex(0.5), 0.0);
    const auto w = predictive_weights(pe, SetPartition(1, {{1}}));
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    auto f_beta = make_stable_density(StableIndex(0.4));
    FragCondEppf fce(StableIndex(0.8), f_beta, 1.0, 6);
    const auto w = predictive_weights(fce, SetPartition(3, {{1, 2}, {3}}));
    double total = 0.0;
    for (double x : w) {
      CHECK(x > 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
  {
    GibbsEppf ge(GibbsWeights::mittag_leffler(StableIndex(0.6), 1.0, 6));
    const auto w = predictive_weights(ge, SetPartition(1, {{1}}));
    CHECK(w[0] > 0.0);
    CHECK(w[1] > 0.0);
  }
}

TEST_CASE("EPPF addition rule holds for every evaluator") {
  const StableIndex a(0.6), b(0.3);
  CHECK(addition_rule_defect(PdEppf(a, 0.5), 5) <= 1e-10);
  CHECK(addition_rule_defect(PdEppf(a, -0.15), 5) <= 1e-10);
  CHECK(addition_rule_defect(GibbsEppf(GibbsWeights::gen_gamma(a, 1.0, 0, 6)), 5) <= 1e-8);
  CHECK(addition_rule_defect(GibbsEppf(GibbsWeights::mittag_leffler(a, 1.0, 6)), 5) <= 1e-8);
  CHECK(addition_rule_defect(CondEppf(make_stable_density(StableIndex(0.5)), 1.3, 6), 5) <= 1e-8);
  CHECK(addition_rule_defect(
            FragCondEppf(StableIndex(0.8), make_stable_density(StableIndex(0.4)), 1.0, 6), 5) <=
        1e-8);
  CHECK(addition_rule_defect(FragEppf(a, GibbsWeights::gen_gamma(b, 1.0, 0, 6)), 5) <= 1e-8);
}

TEST_CASE("block-count composition identity across nested indices") {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.6, 0.3}, {0.8, 0.4}}) {
    const BlocksTable ba(StableIndex(a), 10);
    const BlocksTable bb(StableIndex(b), 10);
    const BlocksTable br(StableIndex(b / a), 10);
    for (int n = 1; n <= 10; ++n) {
      for (int j = 1; j <= n; ++j) {
        double mix = 0.0;
        for (int k = j; k <= n; ++k) mix += ba.at(n, k) * br.at(k, j);
        CHECK(bb.at(n, j) == doctest::Approx(mix).epsilon(1e-10));
      }
    }
  }
}
