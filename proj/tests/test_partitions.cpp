#include <doctest.h>

#include <cmath>
#include <set>

#include "gibbspart/gibbspart.hpp"
#include "test_util.hpp"

using namespace gibbspart;

TEST_CASE("enumerate_set_partitions counts and order") {
  {
    auto all = all_set_partitions(1);
    REQUIRE(all.size() == 1);
    CHECK(all[0].blocks == std::vector<std::vector<int>>{{1}});
  }
  CHECK(all_set_partitions(3).size() == 5);
  for (int n = 1; n <= 10; ++n) {
    long count = 0;
    enumerate_set_partitions(n, [&](const SetPartition&) { ++count; });
    CHECK(static_cast<std::uint64_t>(count) == bell_number(n));
  }
  CHECK(all_set_partitions(8).size() == 4140);
  CHECK_THROWS_AS(enumerate_set_partitions(13, [](const SetPartition&) {}), resource_error);
  CHECK_THROWS_AS(enumerate_set_partitions(0, [](const SetPartition&) {}), domain_error);

  // restricted-growth-string order: first is the single block, last all singletons
  auto all4 = all_set_partitions(4);
  CHECK(all4.front().num_blocks() == 1);
  CHECK(all4.back().num_blocks() == 4);
  // uniqueness
  std::set<std::string> keys;
  for (const auto& p : all4) keys.insert(p.rgs_key());
  CHECK(keys.size() == all4.size());
}

TEST_CASE("to_composition") {
  CHECK(to_composition(SetPartition(3, {{1, 3}, {2}})).sizes() == std::vector<int>{2, 1});
  CHECK(to_composition(SetPartition(3, {{1}, {2}, {3}})).sizes() == std::vector<int>{1, 1, 1});
  CHECK(to_composition(SetPartition(4, {{1, 2, 3, 4}})).sizes() == std::vector<int>{4});
  enumerate_set_partitions(6, [&](const SetPartition& p) {
    CHECK(p.composition().n() == 6);
    CHECK(p.composition().k() == p.num_blocks());
  });
}

TEST_CASE("composition partition counts sum to Bell") {
  std::map<std::vector<int>, double> seen;
  enumerate_set_partitions(6, [&](const SetPartition& p) { seen[p.composition().sizes()] += 1.0; });
  double total = 0.0;
  for (const auto& [sizes, count] : seen) {
    CHECK(Composition(sizes).partition_count() == doctest::Approx(count));
    total += count;
  }
  CHECK(total == doctest::Approx(static_cast<double>(bell_number(6))));
}

TEST_CASE("SetPartition validation") {
  CHECK_THROWS_AS(SetPartition(3, {{1, 2}, {2, 3}}), domain_error);  // overlap
  CHECK_THROWS_AS(SetPartition(3, {{1, 2}}), domain_error);          // not covering
  CHECK_THROWS_AS(SetPartition(3, {{1, 2}, {}}), domain_error);      // empty block
  CHECK_THROWS_AS(SetPartition(2, {{1, 2, 3}}), domain_error);       // out of range
  // canonicalization sorts blocks by least element
  SetPartition p(4, {{4, 2}, {3, 1}});
  CHECK(p.blocks == std::vector<std::vector<int>>{{1, 3}, {2, 4}});
  CHECK(SetPartition::from_labels({5, 2, 5, 1}).blocks ==
        std::vector<std::vector<int>>{{1, 3}, {2}, {4}});
}

TEST_CASE("rank_masses") {
  {
    MassPartition m = rank_masses({0.2, 0.5, 0.3}, 0.0);
    CHECK(m.weights == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(m.tail == 0.0);
  }
  {
    MassPartition m = rank_masses({1.0}, 0.0);
    CHECK(m.weights == std::vector<double>{1.0});
  }
  {
    MassPartition m = rank_masses({0.4, 0.1}, 0.5);
    CHECK(m.weights == std::vector<double>{0.4, 0.1});
    CHECK(m.tail == doctest::Approx(0.5));
  }
  // idempotence
  MassPartition m = rank_masses({0.25, 0.4, 0.0, 0.35}, 0.0);
  MassPartition m2 = rank_masses(m.weights, m.tail);
  CHECK(m2.weights == m.weights);
  CHECK(m2.tail == doctest::Approx(m.tail));
  // normalization guard
  CHECK_THROWS_AS(rank_masses({0.5, 0.2}, 0.0), domain_error);
  CHECK_THROWS_AS(rank_masses({-0.1, 1.1}, 0.0), domain_error);
  // output honors the stored 1e-9 invariant even from 1e-6-level inputs
  MassPartition m3 = rank_masses({0.6 + 5e-7, 0.4}, 0.0);
  m3.validate();
}

TEST_CASE("MassPartition validation") {
  MassPartition bad;
  bad.weights = {0.3, 0.5};
  bad.tail = 0.2;
  CHECK_THROWS_AS(bad.validate(), domain_error);  // not nonincreasing
  bad.weights = {0.5, 0.3};
  bad.tail = 0.4;
  CHECK_THROWS_AS(bad.validate(), domain_error);  // sum != 1
}

TEST_CASE("diversity_estimate: formula and edge cases") {
  MassPartition one;
  one.weights = {1.0};
  one.tail = 0.0;
  const double v = diversity_estimate(one, StableIndex(0.5), 0.5);
  CHECK(v == doctest::Approx(std::sqrt(0.5) * std::tgamma(0.5)).epsilon(1e-12));
  CHECK(v == doctest::Approx(1.25331414).epsilon(1e-6));

  MassPartition small;
  small.weights = {0.4, 0.3, 0.3};
  small.tail = 0.0;
  CHECK(diversity_estimate(small, StableIndex(0.5), 0.5) == 0.0);
  CHECK_THROWS_AS(diversity_estimate(small, StableIndex(0.5), 0.0), domain_error);
}

TEST_CASE("diversity_estimate agrees with the paintbox block-count estimator") {
  // PD(0.5,0) masses; Gamma(1-a)^{-1} eps^a #{w >= eps} vs K_n / n^a on the
  // same draw. Correlated estimators of the same alpha-diversity.
  RngStream rng(5, 21);
  const StableIndex alpha(0.5);
  int agree = 0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    MassPartition m = sample_gem(0.5, 0.0, 10000, rng);
    const double d1 = diversity_estimate(m, alpha, 1e-4);
    // count distinct atoms among n = 10^4 iid picks (binary search on cumsum)
    std::vector<double> cum(m.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      acc += m.weights[i];
      cum[i] = acc;
    }
    const int n = 10000;
    std::set<std::size_t> seen;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      seen.insert(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    }
    const double d2 = static_cast<double>(seen.size()) / std::pow(n, 0.5);
    if (std::fabs(d1 - d2) / d2 < 0.2) ++agree;
  }
  CHECK(agree >= 8);
}
