#include <doctest.h>

#include <cmath>

#include "gibbspart/gibbspart.hpp"
#include "gibbspart/io_json.hpp"
#include "test_util.hpp"

using namespace gibbspart;

TEST_CASE("canonical JSON forms round-trip") {
  const SetPartition p(4, {{1, 3}, {2}, {4}});
  CHECK(to_json(p).dump() == "[[1,3],[2],[4]]");
  CHECK(set_partition_from_json(to_json(p)) == p);
  CHECK_THROWS_AS(set_partition_from_json(nlohmann::json::parse("[[1,2],[2,3]]")), domain_error);
  CHECK_THROWS_AS(set_partition_from_json(nlohmann::json::parse("{\"a\":1}")), domain_error);

  MassPartition m;
  m.weights = {0.6, 0.3};
  m.tail = 0.1;
  const nlohmann::json j = to_json(m);
  CHECK(j.at("tail").get<double>() == doctest::Approx(0.1));
  const MassPartition back = mass_partition_from_json(j);
  CHECK(back.weights == m.weights);
  nlohmann::json bad = j;
  bad["weights"] = std::vector<double>{0.2, 0.9};
  CHECK_THROWS_AS(mass_partition_from_json(bad), domain_error);
}

TEST_CASE("incomplete gamma, chi-square and Kolmogorov tails") {
  CHECK(gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(gamma_q(0.5, 2.0) == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-10));
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(chi_square_sf(18.307038053275146, 10.0) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(kolmogorov_sf(1.3581015) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(kolmogorov_sf(0.05) == 1.0);
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("chi_square_gof detects the right law and pools sparse cells") {
  RngStream rng(51, 1);
  std::map<std::string, double> probs{{"a", 0.5}, {"b", 0.3}, {"c", 0.19}, {"d", 0.01}};
  std::map<std::string, long> counts;
  const long n = 20000;
  for (long i = 0; i < n; ++i) {
    double u = rng.uniform01();
    if (u < 0.5) {
      counts["a"] += 1;
    } else if (u < 0.8) {
      counts["b"] += 1;
    } else if (u < 0.99) {
      counts["c"] += 1;
    } else {
      counts["d"] += 1;
    }
  }
  CHECK(chi_square_gof(counts, probs, n).p_value > 0.01);
  // wrong law fails hard
  std::map<std::string, double> wrong{{"a", 0.4}, {"b", 0.4}, {"c", 0.19}, {"d", 0.01}};
  CHECK(chi_square_gof(counts, wrong, n).p_value < 1e-6);
}

TEST_CASE("chi_square_vs_eppf: calibration, power, degenerate input") {
  const StableIndex half(0.5);
  const PdEppf pd0(half, 0.0);
  auto sampler = [&](RngStream& g) { return sample_pd_partition(half, 0.0, 5, g); };
  // null calibration: >= 38/40 seeded repetitions pass at significance 0.01
  int passes = 0;
  for (int seed = 0; seed < 40; ++seed) {
    const auto rep =
        chi_square_vs_eppf(sampler, pd0, 5, 20000, RngStream(seed, 77), "calibration");
    if (rep.pass) ++passes;
  }
  CHECK(passes >= 38);

  // power: PD(0.5, 0) samples against a PD(0.5, 0.5) evaluator must fail
  const auto wrong = chi_square_vs_eppf(sampler, PdEppf(half, 0.5), 5, 100000,
                                        RngStream(1, 78), "power");
  CHECK_FALSE(wrong.pass);
  CHECK(wrong.p_value < 1e-10);

  CHECK_THROWS_AS(chi_square_vs_eppf(sampler, pd0, 1, 100, RngStream(0, 1), "deg"),
                  domain_error);
  CHECK_THROWS_AS(chi_square_vs_eppf(sampler, pd0, 9, 100, RngStream(0, 1), "cap"),
                  domain_error);
}

TEST_CASE("chi_square_vs_eppf pools by block-size classes for n in {7,8}") {
  const StableIndex a(0.6);
  auto sampler = [&](RngStream& g) { return sample_pd_partition(a, 0.4, 7, g); };
  const auto rep =
      chi_square_vs_eppf(sampler, PdEppf(a, 0.4), 7, 50000, RngStream(3, 79), "classes");
  CHECK(rep.pass);
}

TEST_CASE("two-sample chi-square and KS helpers") {
  RngStream rng(51, 2);
  std::map<std::string, long> a, b;
  for (long i = 0; i < 30000; ++i) {
    a[std::to_string(rng.next_u64() % 6)] += 1;
    b[std::to_string(rng.next_u64() % 6)] += 1;
  }
  CHECK(chi_square_two_sample(a, 30000, b, 30000).p_value > 0.01);

  std::vector<double> x(5000), y(5000), z(5000);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  for (auto& v : z) v = rng.normal() + 0.2;
  CHECK(ks_two_sample(x, y) > 0.01);
  CHECK(ks_two_sample(x, z) < 1e-6);
  CHECK(ks_one_sample(x, [](double t) { return normal_cdf(t); }) > 0.01);
}

TEST_CASE("power smoke: deterministic identities flag wrong inputs") {
  // blocks composition with a mismatched ratio index must show a visible defect
  const BlocksTable ba(StableIndex(0.6), 8);
  const BlocksTable bb(StableIndex(0.3), 8);
  const BlocksTable wrong_ratio(StableIndex(0.45), 8);
  double defect = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (int j = 1; j <= n; ++j) {
      double mix = 0.0;
      for (int k = j; k <= n; ++k) mix += ba.at(n, k) * wrong_ratio.at(k, j);
      defect = std::max(defect, std::fabs(bb.at(n, j) - mix));
    }
  }
  CHECK(defect > 1e-3);
}

TEST_CASE("run_suite: empty list, unknown name, determinism of reports") {
  VerifyParams prm;
  prm.seed = 5;
  CHECK(run_suite({}, prm).empty());
  CHECK_THROWS_AS(run_suite({"no-such-experiment"}, prm), domain_error);

  const auto r1 = run_suite({"blocks-composition", "pitman-moments"}, prm);
  const auto r2 = run_suite({"blocks-composition", "pitman-moments"}, prm);
  CHECK(reports_to_csv(r1) == reports_to_csv(r2));
  CHECK(reports_to_csv(r1).find("runtime_ms") != std::string::npos);
  // timings are zeroed unless requested
  CHECK(reports_to_csv(r1).find(",0\n") != std::string::npos);
}

TEST_CASE("statistical experiments stay reproducible under a fixed seed") {
  VerifyParams prm;
  prm.seed = 11;
  prm.samples = 4000;
  prm.reps = 2;
  const auto r1 = run_experiment("duality-pd", prm);
  const auto r2 = run_experiment("duality-pd", prm);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].statistic == r2[i].statistic);
    CHECK(r1[i].pass == r2[i].pass);
  }
}

TEST_CASE("brownian-sizebias experiment") {
  VerifyParams prm;
  prm.seed = 0;
  prm.samples = 8000;
  for (const auto& rep : run_experiment("brownian-sizebias", prm)) {
    CHECK(rep.pass);
  }
}

TEST_CASE("experiment registry lists every experiment with a description") {
  const auto& reg = experiment_registry();
  CHECK(reg.size() >= 13);
  for (const auto& e : reg) {
    CHECK_FALSE(e.name.empty());
    CHECK(e.fn != nullptr);
    CHECK(e.description != nullptr);
  }
}

TEST_CASE("format_g17 round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 0.12345678901234567, 1e-300}) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_g17(std::numeric_limits<double>::quiet_NaN()).empty());
}
