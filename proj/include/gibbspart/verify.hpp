#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gibbspart/eppf.hpp"
#include "gibbspart/errors.hpp"
#include "gibbspart/fragcoag.hpp"
#include "gibbspart/mathutil.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/quadrature.hpp"
#include "gibbspart/rng.hpp"
#include "gibbspart/samplers.hpp"
#include "gibbspart/special_fn.hpp"
#include "gibbspart/stable.hpp"

namespace gibbspart {

struct ExperimentReport {
  std::string name;
  double statistic = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  long n_samples = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  long runtime_ms = 0;
};

struct VerifyParams {
  std::uint64_t seed = 0;
  std::optional<double> alpha, beta, sigma, theta, lambda, zeta, y, s;
  std::optional<long> samples;
  std::optional<int> n, reps, sticks, m;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt_param(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Statistical test helpers
// ---------------------------------------------------------------------------

struct GofResult {
  double stat = 0.0;
  double p_value = 1.0;
  int cells = 0;
  int dof = 0;
};

// Goodness of fit with standard pooling: cells with expected count below 5
// are merged into one. Observed keys missing from the model are charged to
// the residual-probability cell.
inline GofResult chi_square_gof(const std::map<std::string, long>& counts,
                                const std::map<std::string, double>& probs, long n) {
  GofResult r;
  double pooled_exp = 0.0;
  long pooled_obs = 0;
  double prob_mass = 0.0;
  long seen = 0;
  for (const auto& [key, p] : probs) {
    prob_mass += p;
    const double e = p * static_cast<double>(n);
    auto it = counts.find(key);
    const long o = (it == counts.end()) ? 0 : it->second;
    seen += o;
    if (e < 5.0) {
      pooled_exp += e;
      pooled_obs += o;
    } else {
      r.stat += (o - e) * (o - e) / e;
      ++r.cells;
    }
  }
  pooled_exp += std::max(0.0, 1.0 - prob_mass) * static_cast<double>(n);
  pooled_obs += n - seen;  // observations outside the model's support
  if (pooled_exp > 0.0 || pooled_obs > 0) {
    const double e = std::max(pooled_exp, 1e-12);
    r.stat += (pooled_obs - e) * (pooled_obs - e) / e;
    ++r.cells;
  }
  r.dof = r.cells - 1;
  if (r.dof < 1) throw domain_error("chi_square_gof: degenerate binning");
  r.p_value = chi_square_sf(r.stat, r.dof);
  return r;
}

// Two-sample homogeneity test on pooled categories.
inline GofResult chi_square_two_sample(const std::map<std::string, long>& a, long na,
                                       const std::map<std::string, long>& b, long nb) {
  std::map<std::string, std::pair<long, long>> merged;
  for (const auto& [k, c] : a) merged[k].first = c;
  for (const auto& [k, c] : b) merged[k].second = c;
  const double n = static_cast<double>(na + nb);
  GofResult r;
  double pa_exp = 0.0, pb_exp = 0.0;
  long pa_obs = 0, pb_obs = 0;
  for (const auto& [k, oc] : merged) {
    const double share = (oc.first + oc.second) / n;
    const double ea = share * na;
    const double eb = share * nb;
    if (ea < 5.0 || eb < 5.0) {
      pa_exp += ea;
      pb_exp += eb;
      pa_obs += oc.first;
      pb_obs += oc.second;
      continue;
    }
    r.stat += (oc.first - ea) * (oc.first - ea) / ea + (oc.second - eb) * (oc.second - eb) / eb;
    ++r.cells;
  }
  if (pa_exp > 0.0) {
    r.stat += (pa_obs - pa_exp) * (pa_obs - pa_exp) / std::max(pa_exp, 1e-12) +
              (pb_obs - pb_exp) * (pb_obs - pb_exp) / std::max(pb_exp, 1e-12);
    ++r.cells;
  }
  r.dof = r.cells - 1;
  if (r.dof < 1) throw domain_error("chi_square_two_sample: degenerate binning");
  r.p_value = chi_square_sf(r.stat, r.dof);
  return r;
}

// Independence test on a two-way table. Rows and columns with small margins
// are merged so every expected cell count is at least ~10 (margin threshold
// sqrt(10n)); a residual category still below the threshold is dropped, which
// preserves independence under the null.
inline GofResult contingency_chi_square(
    const std::map<std::pair<std::string, std::string>, long>& joint) {
  std::map<std::string, long> rows, cols;
  long n_all = 0;
  for (const auto& [rc, c] : joint) {
    rows[rc.first] += c;
    cols[rc.second] += c;
    n_all += c;
  }
  const double threshold = std::sqrt(10.0 * static_cast<double>(n_all));
  auto rename = [&](const std::map<std::string, long>& margins, const std::string& key) {
    auto it = margins.find(key);
    return (it != margins.end() && it->second >= threshold) ? key : std::string("_other");
  };
  std::map<std::pair<std::string, std::string>, long> pooled;
  std::map<std::string, long> prow, pcol;
  for (const auto& [rc, c] : joint) {
    const auto key = std::make_pair(rename(rows, rc.first), rename(cols, rc.second));
    pooled[key] += c;
    prow[key.first] += c;
    pcol[key.second] += c;
  }
  auto drop_sparse_other = [&](std::map<std::string, long>& margins, bool is_row) {
    auto it = margins.find("_other");
    if (it == margins.end() || it->second >= threshold) return;
    std::map<std::pair<std::string, std::string>, long> kept;
    for (const auto& [rc, c] : pooled) {
      if ((is_row ? rc.first : rc.second) != "_other") kept[rc] = c;
    }
    pooled.swap(kept);
    margins.erase(it);
  };
  drop_sparse_other(prow, true);
  drop_sparse_other(pcol, false);
  // recompute margins over the retained table
  prow.clear();
  pcol.clear();
  long n = 0;
  for (const auto& [rc, c] : pooled) {
    prow[rc.first] += c;
    pcol[rc.second] += c;
    n += c;
  }
  GofResult r;
  if (prow.size() < 2 || pcol.size() < 2 || n == 0) {
    r.dof = 0;  // nothing to test in this stratum
    return r;
  }
  for (const auto& [rk, rcnt] : prow) {
    for (const auto& [ck, ccnt] : pcol) {
      const double e = static_cast<double>(rcnt) * static_cast<double>(ccnt) / n;
      auto it = pooled.find({rk, ck});
      const long o = (it == pooled.end()) ? 0 : it->second;
      r.stat += (o - e) * (o - e) / std::max(e, 1e-12);
    }
  }
  r.cells = static_cast<int>(prow.size() * pcol.size());
  r.dof = static_cast<int>((prow.size() - 1) * (pcol.size() - 1));
  r.p_value = chi_square_sf(r.stat, r.dof);
  return r;
}

inline double ks_pvalue(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
}

inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::fabs((i + 1.0) / n - f));
    d = std::max(d, std::fabs(static_cast<double>(i) / n - f));
  }
  return ks_pvalue(d, static_cast<double>(n));
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  const double n_eff = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  return ks_pvalue(d, n_eff);
}

// ---------------------------------------------------------------------------
// Exact-enumeration utilities
// ---------------------------------------------------------------------------

// Per-partition probabilities of an EPPF on [n], keyed by restricted growth
// string; values are computed once per block-size multiset.
inline std::map<std::string, double> eppf_partition_probs(const Eppf& e, int n) {
  std::map<std::string, double> probs;
  std::map<std::vector<int>, double> cache;
  enumerate_set_partitions(n, [&](const SetPartition& p) {
    const Composition c = p.composition();
    auto it = cache.find(c.sizes());
    if (it == cache.end()) it = cache.emplace(c.sizes(), e.eval(c)).first;
    probs[p.rgs_key()] = it->second;
  });
  return probs;
}

inline std::map<std::string, double> eppf_composition_probs(const Eppf& e, int n) {
  std::map<std::string, double> probs;
  std::map<std::vector<int>, double> cache;
  enumerate_set_partitions(n, [&](const SetPartition& p) {
    const Composition c = p.composition();
    auto it = cache.find(c.sizes());
    if (it == cache.end()) it = cache.emplace(c.sizes(), e.eval(c)).first;
    std::string key;
    for (int s : c.sizes()) key += std::to_string(s) + "|";
    probs[key] += it->second;
  });
  return probs;
}

inline double eppf_total_mass(const Eppf& e, int n) {
  double total = 0.0;
  std::map<std::vector<int>, double> cache;
  enumerate_set_partitions(n, [&](const SetPartition& p) {
    const Composition c = p.composition();
    auto it = cache.find(c.sizes());
    if (it == cache.end()) it = cache.emplace(c.sizes(), e.eval(c)).first;
    total += it->second;
  });
  return total;
}

inline std::string composition_key(const Composition& c) {
  std::string key;
  for (int s : c.sizes()) key += std::to_string(s) + "|";
  return key;
}

// Chi-square comparison of sampled partitions of [n] against an evaluator:
// exact partition cells for n <= 6, block-size-class cells for n in {7,8}.
inline ExperimentReport chi_square_vs_eppf(const std::function<SetPartition(RngStream&)>& sampler,
                                           const Eppf& evaluator, int n, long n_samples,
                                           RngStream rng, const std::string& name,
                                           double significance = 0.01) {
  if (n < 2) throw domain_error("chi_square_vs_eppf: degenerate test for n < 2");
  if (n > 8) throw domain_error("chi_square_vs_eppf: enumeration bound is n <= 8");
  detail::Timer timer;
  const bool exact_cells = n <= 6;
  const std::map<std::string, double> probs =
      exact_cells ? eppf_partition_probs(evaluator, n) : eppf_composition_probs(evaluator, n);
  std::map<std::string, long> counts;
  for (long i = 0; i < n_samples; ++i) {
    const SetPartition p = sampler(rng);
    if (p.n != n) throw domain_error("chi_square_vs_eppf: sampler produced wrong n");
    counts[exact_cells ? p.rgs_key() : composition_key(p.composition())] += 1;
  }
  const GofResult g = chi_square_gof(counts, probs, n_samples);
  ExperimentReport rep;
  rep.name = name;
  rep.statistic = g.stat;
  rep.p_value = g.p_value;
  rep.n_samples = n_samples;
  rep.pass = g.p_value > significance;
  rep.seed = rng.seed();
  rep.runtime_ms = timer.ms();
  return rep;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace experiments {

inline ExperimentReport deterministic_report(const std::string& name, double defect, double tol,
                                             const detail::Timer& timer, std::uint64_t seed,
                                             long n_samples = 0) {
  ExperimentReport r;
  r.name = name;
  r.statistic = defect;
  r.abs_error = defect;
  r.n_samples = n_samples;
  r.pass = defect <= tol;
  r.seed = seed;
  r.runtime_ms = timer.ms();
  return r;
}

// --- special-fn: Laplace transforms, Mittag-Leffler moments, Stirling recurrence.
inline std::vector<ExperimentReport> special_fn(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const DensityEvalConfig cfg;

  {
    detail::Timer t;
    double defect = 0.0;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
      const StableIndex alpha(a);
      const StableDensity f(alpha, cfg);
      QuadOptions opt;
      opt.rel_tol = 1e-9;
      opt.max_panels = 4096;
      for (double lam : {0.5, 1.0, 2.0}) {
        const double lt =
            integrate_positive_axis([&](double x) { return std::exp(-lam * x) * f(x); }, opt);
        defect = std::max(defect, std::fabs(lt - std::exp(-std::pow(lam, a))));
      }
      // total mass, integrated in Mittag-Leffler space where tails are light
      const double mass = integrate_positive_axis([&](double s) { return ml_pdf(f, s); }, opt);
      defect = std::max(defect, std::fabs(mass - 1.0));
    }
    out.push_back(deterministic_report("special-fn/stable-laplace", defect, 1e-6, t, prm.seed));
  }
  {
    detail::Timer t;
    double defect = 0.0;
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.max_panels = 4096;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
      const StableIndex alpha(a);
      const StableDensity f(alpha, cfg);
      for (int p = 1; p <= 2; ++p) {
        const double mom = integrate_positive_axis(
            [&](double s) { return std::pow(s, p) * ml_pdf(f, s); }, opt);
        const double exact = std::exp(std::lgamma(p + 1.0) - std::lgamma(p * a + 1.0));
        defect = std::max(defect, std::fabs(mom - exact));
      }
    }
    out.push_back(deterministic_report("special-fn/ml-moments", defect, 1e-6, t, prm.seed));
  }
  {
    detail::Timer t;
    double defect = 0.0;
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.max_panels = 4096;
    const std::vector<std::tuple<double, double, long, double>> grid = {
        {0.5, 0.5, 0, 0.7}, {0.5, 0.5, 1, 0.7}, {0.6, 1.2, 0, 1.0}, {0.7, 0.9, 1, 2.0}};
    for (const auto& [b, th, j, lam] : grid) {
      const StableIndex beta(b);
      const StableDensity f(beta, cfg);
      const double thp = th + static_cast<double>(j) * b;
      const double series = gml_function(beta, th, j, lam, cfg);
      const double quad = integrate_positive_axis(
          [&](double s) { return std::exp(-lam * s) * gml_pdf(f, thp, s); }, opt);
      defect = std::max(defect, std::fabs(series - quad));
    }
    out.push_back(deterministic_report("special-fn/gml-laplace", defect, 1e-6, t, prm.seed));
  }
  {
    // residual of the returned values in S(n+1,k) = S(n,k-1) + (n-k a) S(n,k)
    detail::Timer t;
    double defect = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
      const StirlingTable table(StableIndex(a), 21);
      for (int n = 1; n <= 20; ++n) {
        for (int k = 1; k <= n + 1 && k <= 20; ++k) {
          double v = 0.0;
          if (k >= 2 && k - 1 <= n) v += table.value(n, k - 1);
          if (k <= n) v += (n - k * a) * table.value(n, k);
          defect = std::max(defect,
                            std::fabs(table.value(n + 1, k) - v) / std::fabs(table.value(n + 1, k)));
        }
      }
    }
    out.push_back(deterministic_report("special-fn/stirling-recurrence", defect, 1e-12, t, prm.seed));
  }
  {
    // explicit alternating-sum route, tolerance scaled by its cancellation factor
    detail::Timer t;
    double defect = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
      const StableIndex alpha(a);
      const StirlingTable table(alpha, 21);
      for (int n = 1; n <= 20; ++n) {
        for (int k = 1; k <= n; ++k) {
          double cond = 1.0;
          const double alt = gen_stirling_altsum(alpha, n, k, &cond);
          const double rec = table.value(n, k);
          const double rel = std::fabs(rec - alt) / std::fabs(rec);
          defect = std::max(defect, rel / std::max(1.0, cond));
        }
      }
    }
    out.push_back(
        deterministic_report("special-fn/stirling-formula-crosscheck", defect, 1e-12, t, prm.seed));
  }
  return out;
}

// --- eppf-normalization: every evaluator sums to one over partitions of [n], n <= 6.
inline std::vector<ExperimentReport> eppf_normalization(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const int n_top = prm.n.value_or(6);
  const DensityEvalConfig cfg;

  auto check = [&](const std::string& label, const Eppf& e, double tol) {
    detail::Timer t;
    double defect = 0.0;
    for (int n = 1; n <= n_top; ++n) {
      defect = std::max(defect, std::fabs(eppf_total_mass(e, n) - 1.0));
    }
    out.push_back(
        deterministic_report("eppf-normalization/" + label, defect, tol, t, prm.seed));
  };

  const StableIndex a06(0.6);
  for (double th : {-0.25 * 0.6, 0.0, 0.5, 2.0}) {
    check("pd-theta=" + detail::fmt_param(th), PdEppf(a06, th), 1e-10);
  }
  check("gibbs-gg-zeta=1", GibbsEppf(GibbsWeights::gen_gamma(a06, 1.0, 0, n_top)), 1e-6);
  check("gibbs-ml-lambda=1", GibbsEppf(GibbsWeights::mittag_leffler(a06, 1.0, n_top, cfg)), 1e-6);
  check("cond-beta=0.5-y=1.3",
        CondEppf(make_stable_density(StableIndex(0.5), cfg), 1.3, n_top), 1e-6);
  check("fragcond-a=0.8-b=0.4-y=1",
        FragCondEppf(StableIndex(0.8), make_stable_density(StableIndex(0.4), cfg), 1.0, n_top),
        1e-6);
  check("frag-gg-a=0.6-b=0.3",
        FragEppf(a06, GibbsWeights::gen_gamma(StableIndex(0.3), 1.0, 0, n_top)), 1e-6);
  check("frag-pd-a=0.6-b=0.3-th=0.3",
        FragEppf(a06, GibbsWeights::pd(StableIndex(0.3), 0.3, n_top)), 1e-10);
  return out;
}

// --- blocks-composition: K^[b]_n =d K^[b/a]_{K^[a]_n}.
inline std::vector<ExperimentReport> blocks_composition(const VerifyParams& prm) {
  detail::Timer t;
  double defect = 0.0;
  const std::vector<std::pair<double, double>> pairs = {{0.6, 0.3}, {0.8, 0.4}, {0.5, 0.25}};
  const int n_top = prm.n.value_or(10);
  for (const auto& [a, b] : pairs) {
    const BlocksTable ba(StableIndex(a), n_top);
    const BlocksTable bb(StableIndex(b), n_top);
    const BlocksTable br(StableIndex(b / a), n_top);
    for (int n = 1; n <= n_top; ++n) {
      for (int j = 1; j <= n; ++j) {
        double mix = 0.0;
        for (int k = j; k <= n; ++k) mix += ba.at(n, k) * br.at(k, j);
        defect = std::max(defect, std::fabs(bb.at(n, j) - mix));
      }
    }
  }
  return {deterministic_report("blocks-composition", defect, 1e-8, t, prm.seed)};
}

// --- pitman-moments: the Gibbs-weight identity that makes PD(beta,theta)
//     fragment exactly to PD(alpha,theta).
inline std::vector<ExperimentReport> pitman_moments(const VerifyParams& prm) {
  detail::Timer t;
  double defect = 0.0;
  double worked_case = 0.0;
  const std::vector<std::pair<double, double>> pairs = {{0.6, 0.3}, {0.8, 0.4}};
  const int k_top = 10;
  for (const auto& [a, b] : pairs) {
    const BlocksTable br(StableIndex(b / a), k_top);
    for (double ratio : {0.5, 1.0, 2.0}) {
      const double th = ratio * b;
      for (int k = 1; k <= k_top; ++k) {
        double lhs = 0.0;
        for (int j = 1; j <= k; ++j) {
          lhs += br.at(k, j) * std::exp(std::lgamma(th / b + j) - std::lgamma(th / b + 1.0) -
                                        std::lgamma(j));
        }
        const double rhs =
            std::exp(std::lgamma(th / a + k) - std::lgamma(th / a + 1.0) - std::lgamma(k));
        defect = std::max(defect, std::fabs(lhs - rhs));
        if (k == 2 && ratio == 1.0) worked_case = std::max(worked_case, std::fabs(lhs - 1.5));
      }
    }
  }
  defect = std::max(defect, worked_case);
  return {deterministic_report("pitman-moments", defect, 1e-10, t, prm.seed)};
}

// --- duality-pd: FRAG_{a,-b} maps PD(b,th) partitions to PD(a,th); seeded
//     calibration requires >= 95% chi-square passes.
inline std::vector<ExperimentReport> duality_pd(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  std::vector<std::tuple<double, double, double>> combos;
  if (prm.alpha || prm.beta || prm.theta) {
    combos.emplace_back(prm.alpha.value_or(0.6), prm.beta.value_or(0.3), prm.theta.value_or(0.0));
  } else {
    combos = {{0.6, 0.3, 0.0}, {0.6, 0.3, 0.3}, {0.8, 0.4, 0.5}};
  }
  const int n = prm.n.value_or(5);
  const long samples = prm.samples.value_or(100000);
  const int reps = prm.reps.value_or(40);
  const RngStream base(prm.seed, detail::fnv1a("duality-pd"));
  int combo_idx = 0;
  for (const auto& [a, b, th] : combos) {
    detail::Timer t;
    const StableIndex alpha(a), beta(b);
    const FragParams fp(alpha, beta);
    const PdEppf target(alpha, th);
    int passes = 0;
    double first_p = std::numeric_limits<double>::quiet_NaN();
    for (int r = 0; r < reps; ++r) {
      RngStream rng = base.substream(static_cast<std::uint64_t>(combo_idx) * 1024 + r);
      auto sampler = [&](RngStream& g) {
        const SetPartition p = sample_pd_partition(beta, th, n, g);
        return frag_set_partition(p, fp, g);
      };
      const ExperimentReport rep =
          chi_square_vs_eppf(sampler, target, n, samples, rng, "duality-pd-rep");
      if (r == 0) first_p = rep.p_value;
      if (rep.pass) ++passes;
    }
    ExperimentReport rep;
    rep.name = "duality-pd[a=" + detail::fmt_param(a) + ",b=" + detail::fmt_param(b) +
               ",th=" + detail::fmt_param(th) + "]";
    rep.statistic = static_cast<double>(passes) / reps;
    rep.p_value = (reps == 1) ? first_p : std::numeric_limits<double>::quiet_NaN();
    rep.n_samples = samples * reps;
    rep.pass = rep.statistic >= 0.95;
    rep.seed = prm.seed;
    rep.runtime_ms = t.ms();
    out.push_back(rep);
    ++combo_idx;
  }
  return out;
}

// --- frag-composition: FRAG_{a,-s} . FRAG_{s,-b} = FRAG_{a,-b} in law.
inline std::vector<ExperimentReport> frag_composition(const VerifyParams& prm) {
  const double b = prm.beta.value_or(0.2);
  const double sg = prm.sigma.value_or(0.4);
  const double a = prm.alpha.value_or(0.8);
  const int n = prm.n.value_or(4);
  const long samples = prm.samples.value_or(100000);
  detail::Timer t;
  const StableIndex alpha(a), sigma(sg), beta(b);
  const FragParams one_step(alpha, beta);
  const FragParams step1(sigma, beta);
  const FragParams step2(alpha, sigma);
  RngStream rng(prm.seed, detail::fnv1a("frag-composition"));
  std::map<std::string, long> counts_one, counts_two;
  for (long i = 0; i < samples; ++i) {
    const SetPartition base1 = sample_pd_partition(beta, 0.0, n, rng);
    counts_one[frag_set_partition(base1, one_step, rng).rgs_key()] += 1;
    const SetPartition base2 = sample_pd_partition(beta, 0.0, n, rng);
    counts_two[frag_set_partition(frag_set_partition(base2, step1, rng), step2, rng).rgs_key()] +=
        1;
  }
  const GofResult g = chi_square_two_sample(counts_one, samples, counts_two, samples);
  ExperimentReport rep;
  rep.name = "frag-composition[b=" + detail::fmt_param(b) + ",s=" + detail::fmt_param(sg) +
             ",a=" + detail::fmt_param(a) + "]";
  rep.statistic = g.stat;
  rep.p_value = g.p_value;
  rep.n_samples = 2 * samples;
  rep.pass = g.p_value > 0.01;
  rep.seed = prm.seed;
  rep.runtime_ms = t.ms();

  // both arms should also match the exact PD(alpha,0) law
  const PdEppf target(alpha, 0.0);
  const std::map<std::string, double> probs = eppf_partition_probs(target, n);
  const GofResult g1 = chi_square_gof(counts_one, probs, samples);
  ExperimentReport rep1;
  rep1.name = "frag-composition/one-step-vs-pd";
  rep1.statistic = g1.stat;
  rep1.p_value = g1.p_value;
  rep1.n_samples = samples;
  rep1.pass = g1.p_value > 0.01;
  rep1.seed = prm.seed;
  rep1.runtime_ms = t.ms();
  const GofResult g2 = chi_square_gof(counts_two, probs, samples);
  ExperimentReport rep2 = rep1;
  rep2.name = "frag-composition/two-step-vs-pd";
  rep2.statistic = g2.stat;
  rep2.p_value = g2.p_value;
  rep2.pass = g2.p_value > 0.01;
  return {rep, rep1, rep2};
}

// --- frag-disintegration: Int frag_cond_eppf(a,b,y,c) f_b(y) dy = pd_eppf(a,0,c).
inline std::vector<ExperimentReport> frag_disintegration(const VerifyParams& prm) {
  detail::Timer t;
  const StableIndex alpha(prm.alpha.value_or(0.8));
  const StableIndex beta(prm.beta.value_or(0.4));
  const StableDensity f_beta(beta);
  double defect = 0.0;
  QuadOptions opt;
  opt.rel_tol = 1e-7;
  opt.max_panels = 2048;
  for (const auto& sizes :
       std::vector<std::vector<int>>{{2, 1}, {3, 1}, {2, 2}}) {
    const Composition c(sizes);
    const double integral = integrate_positive_axis(
        [&](double y) { return frag_cond_eppf(alpha, f_beta, y, c) * f_beta(y); }, opt);
    defect = std::max(defect, std::fabs(integral - pd_eppf(alpha, 0.0, c)));
  }
  return {deterministic_report("frag-disintegration", defect, 1e-5, t, prm.seed)};
}

// --- hermite: closed Hermite-function forms against the quadrature route at
//     beta = 1/2, plus the fragmented mixture for alpha > 1/2.
inline std::vector<ExperimentReport> hermite(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const StableIndex half(0.5);
  const StableDensity f_half(half);
  const std::vector<std::pair<int, int>> nk = {{2, 1}, {3, 2}, {4, 2}};
  const std::vector<double> s_grid = {0.5, 1.0, 2.0};

  auto rep_comp = [](int n, int k) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 1);
    sizes[0] = n - k + 1;
    return Composition(sizes);
  };

  {
    detail::Timer t;
    double defect = 0.0;
    for (const auto& [n, k] : nk) {
      const Composition c = rep_comp(n, k);
      for (double s : s_grid) {
        const double y = 0.5 / (s * s);
        const double lhs = cond_eppf(f_half, y, c);
        const double closed = std::pow(s, k - 1) * hermite_fn((2.0 * n - k - 1.0) / 2.0, s) *
                              std::exp(std::lgamma(n) + (n - 1.0) * std::log(2.0) -
                                       std::lgamma(k)) *
                              pd_eppf(half, 0.0, c);
        defect = std::max(defect, std::fabs(lhs - closed));
      }
    }
    out.push_back(deterministic_report("hermite/cond-eppf-closed-form", defect, 1e-6, t, prm.seed));
  }
  {
    detail::Timer t;
    double defect = 0.0;
    for (const auto& [n, k] : nk) {
      for (double s : s_grid) {
        const double y = 0.5 / (s * s);
        const double lhs = big_g(f_half, n, k, y);
        const double rhs = std::pow(2.0, n - k) * std::pow(s, k - 1) *
                           hermite_fn((2.0 * n - k - 1.0) / 2.0, s);
        defect = std::max(defect, std::fabs(lhs - rhs));
      }
    }
    out.push_back(deterministic_report("hermite/big-g-identity", defect, 1e-6, t, prm.seed));
  }
  {
    // FRAG_{a,-1/2} of a Brownian-excursion partition: mixture of Hermite
    // functions with mixing index 1/(2a) = (1/2)/a.
    detail::Timer t;
    const double a = prm.alpha.value_or(0.8);
    const StableIndex alpha(a);
    double defect = 0.0;
    const std::vector<std::pair<int, int>> nk_mixed = {{1, 1}, {3, 2}};
    for (const auto& [n, k] : nk_mixed) {
      const Composition c = rep_comp(n, k);
      const BlocksTable mix(StableIndex(0.5 / a), k);
      for (double s : s_grid) {
        const double y = 0.5 / (s * s);
        const double lhs = frag_cond_eppf(alpha, f_half, y, c);
        double mixture = 0.0;
        for (int j = 1; j <= k; ++j) {
          mixture += mix.at(k, j) * std::pow(2.0, n - 1) * std::pow(s, j - 1) *
                     hermite_fn((2.0 * n - j - 1.0) / 2.0, s) *
                     std::exp(std::lgamma(n) - std::lgamma(j));
        }
        defect = std::max(defect, std::fabs(lhs - mixture * pd_eppf(alpha, 0.0, c)));
      }
    }
    out.push_back(deterministic_report("hermite/frag-mixture", defect, 1e-5, t, prm.seed));
  }
  return out;
}

// Shared margin/independence analysis of dependent-coagulation draws.
struct CoagMarginChecks {
  std::map<std::string, long> v_tilde_counts;
  std::map<std::string, long> v_counts;
  std::map<int, std::map<std::string, long>> q_counts_by_k;
  std::map<int, std::map<std::pair<std::string, std::string>, long>> joint_by_k;
  long n_draws = 0;

  void add(const DependentCoagDraw& d) {
    const int k = d.v_tilde.num_blocks();
    v_tilde_counts[d.v_tilde.rgs_key()] += 1;
    v_counts[d.v.rgs_key()] += 1;
    q_counts_by_k[k][d.q.rgs_key()] += 1;
    joint_by_k[k][{d.v_tilde.rgs_key(), d.q.rgs_key()}] += 1;
    ++n_draws;
  }

  // q | #blocks(v_tilde) = k follows the reference EPPF on [k].
  GofResult q_margin(const Eppf& ref) const {
    GofResult total;
    for (const auto& [k, counts] : q_counts_by_k) {
      if (k < 2) continue;
      long nk = 0;
      for (const auto& [key, c] : counts) nk += c;
      if (nk < 200) continue;
      const GofResult g = chi_square_gof(counts, eppf_partition_probs(ref, k), nk);
      total.stat += g.stat;
      total.dof += g.dof;
      total.cells += g.cells;
    }
    if (total.dof < 1) throw domain_error("q_margin: no testable strata");
    total.p_value = chi_square_sf(total.stat, total.dof);
    return total;
  }

  GofResult independence() const {
    GofResult total;
    for (const auto& [k, joint] : joint_by_k) {
      const GofResult g = contingency_chi_square(joint);
      if (g.dof < 1) continue;
      total.stat += g.stat;
      total.dof += g.dof;
      total.cells += g.cells;
    }
    if (total.dof < 1) throw domain_error("independence: no testable strata");
    total.p_value = chi_square_sf(total.stat, total.dof);
    return total;
  }
};

inline ExperimentReport gof_report(const std::string& name, const GofResult& g, long n,
                                   std::uint64_t seed, long ms) {
  ExperimentReport rep;
  rep.name = name;
  rep.statistic = g.stat;
  rep.p_value = g.p_value;
  rep.n_samples = n;
  rep.pass = g.p_value > 0.01;
  rep.seed = seed;
  rep.runtime_ms = ms;
  return rep;
}

// --- dependent-coag: margin and independence checks of the joint law P^{b/a}_a(h).
inline std::vector<ExperimentReport> dependent_coag(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const double a = prm.alpha.value_or(0.8);
  const double b = prm.beta.value_or(0.4);
  const double zeta = prm.zeta.value_or(1.0);
  const int n = prm.n.value_or(4);
  const long samples = prm.samples.value_or(100000);
  const StableIndex alpha(a), beta(b);
  const StableIndex ratio(b / a);

  {  // generalized-gamma tilt: coagulated partitions follow the gg Gibbs EPPF at beta
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("dependent-coag-gg"));
    DependentCoagSampler smp(alpha, beta, TiltFunction::gg_zeta(beta, zeta, 0), n);
    std::map<std::string, long> v_counts;
    for (long i = 0; i < samples; ++i) v_counts[smp.draw(rng).v.rgs_key()] += 1;
    const GibbsEppf target(GibbsWeights::gen_gamma(beta, zeta, 0, n));
    const GofResult g = chi_square_gof(v_counts, eppf_partition_probs(target, n), samples);
    out.push_back(gof_report("dependent-coag/gg-v-margin", g, samples, prm.seed, t.ms()));
  }
  {  // unit tilt: independent PD margins
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("dependent-coag-unit"));
    DependentCoagSampler smp(alpha, beta, TiltFunction::unit(beta), n);
    CoagMarginChecks checks;
    for (long i = 0; i < samples; ++i) checks.add(smp.draw(rng));
    const GofResult gv = chi_square_gof(checks.v_tilde_counts,
                                        eppf_partition_probs(PdEppf(alpha, 0.0), n), samples);
    out.push_back(gof_report("dependent-coag/unit-vtilde-margin", gv, samples, prm.seed, t.ms()));
    out.push_back(gof_report("dependent-coag/unit-q-margin",
                             checks.q_margin(PdEppf(ratio, 0.0)), samples, prm.seed, t.ms()));
    out.push_back(gof_report("dependent-coag/unit-independence", checks.independence(), samples,
                             prm.seed, t.ms()));
    const GofResult gc = chi_square_gof(checks.v_counts,
                                        eppf_partition_probs(PdEppf(beta, 0.0), n), samples);
    out.push_back(gof_report("dependent-coag/unit-v-margin", gc, samples, prm.seed, t.ms()));
  }
  return out;
}

// --- gg-duality: the explicit generalized-gamma construction; gamma
//     randomization recovers PD(alpha,theta) x PD(b/a,theta/a).
inline std::vector<ExperimentReport> gg_duality(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const double a = prm.alpha.value_or(0.6);
  const double b = prm.beta.value_or(0.3);
  const int n = prm.n.value_or(4);
  const long samples = prm.samples.value_or(100000);
  const StableIndex alpha(a), beta(b);
  const StableIndex ratio(b / a);

  auto run_randomized = [&](int m, double theta, const std::string& label) {
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("gg-duality-" + label));
    GgDualSampler smp(beta, alpha, m, n);
    CoagMarginChecks checks;
    for (long i = 0; i < samples; ++i) checks.add(smp.draw_randomized(theta, rng));
    const GofResult gv = chi_square_gof(checks.v_tilde_counts,
                                        eppf_partition_probs(PdEppf(alpha, theta), n), samples);
    out.push_back(gof_report("gg-duality/" + label + "-vtilde", gv, samples, prm.seed, t.ms()));
    out.push_back(gof_report("gg-duality/" + label + "-q",
                             checks.q_margin(PdEppf(ratio, theta / a)), samples, prm.seed,
                             t.ms()));
    out.push_back(gof_report("gg-duality/" + label + "-independence", checks.independence(),
                             samples, prm.seed, t.ms()));
    const GofResult gc = chi_square_gof(checks.v_counts,
                                        eppf_partition_probs(PdEppf(beta, theta), n), samples);
    out.push_back(gof_report("gg-duality/" + label + "-v", gc, samples, prm.seed, t.ms()));
  };

  run_randomized(0, prm.theta.value_or(0.6), "m0-theta" + detail::fmt_param(prm.theta.value_or(0.6)));
  run_randomized(1, -0.2, "m1-theta-0.2");

  {  // fixed zeta: v follows the gg Gibbs EPPF at beta
    detail::Timer t;
    const double zeta = prm.zeta.value_or(1.0);
    RngStream rng(prm.seed, detail::fnv1a("gg-duality-fixed"));
    GgDualSampler smp(beta, alpha, 0, n);
    std::map<std::string, long> v_counts;
    for (long i = 0; i < samples; ++i) v_counts[smp.draw_fixed(zeta, rng).v.rgs_key()] += 1;
    const GibbsEppf target(GibbsWeights::gen_gamma(beta, zeta, 0, n));
    const GofResult g = chi_square_gof(v_counts, eppf_partition_probs(target, n), samples);
    out.push_back(gof_report("gg-duality/fixed-zeta-v", g, samples, prm.seed, t.ms()));
  }
  return out;
}

// --- diversity-rep: sampled alpha-diversity of a fragmented PK_beta(h) law
//     against the quadrature density E_{b/a}[h(s^{-1/a} T^{1/a})] g_a(s).
inline std::vector<ExperimentReport> diversity_rep(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const double a = prm.alpha.value_or(0.8);
  const double b = prm.beta.value_or(0.4);
  const long samples = prm.samples.value_or(10000);
  const int jump_count = prm.sticks.value_or(2000);
  const int z_terms = 600;
  const StableIndex alpha(a), beta(b);
  const StableIndex ratio(b / a);
  const StableDensity f_alpha(alpha);
  const StableDensity f_ratio(ratio);
  const double mean_z = std::exp(std::lgamma(-b / a + 2.0) + std::lgamma(1.0 - b) -
                                 std::lgamma(-b / a + 1.0) - std::lgamma(1.0 - b + a));

  auto route_a = [&](const TiltFunction& h, RngStream& rng) {
    std::vector<double> zs(static_cast<std::size_t>(samples));
    for (long i = 0; i < samples; ++i) {
      const PkDraw d = sample_pk_tilted(beta, h, jump_count, rng);
      double z = 0.0;
      double tail_pow = 0.0;
      for (std::size_t j = 0; j < d.masses.weights.size(); ++j) {
        const double wa = std::pow(d.masses.weights[j], a);
        if (static_cast<int>(j) < z_terms) {
          z += wa * sample_ml(alpha, -b, rng);
        } else {
          tail_pow += wa;  // small ranked weights: substitute the mean
        }
      }
      zs[static_cast<std::size_t>(i)] = z + tail_pow * mean_z;
    }
    return zs;
  };

  // cumulative CDF of rho(s) = inner(s) g_a(s) on a log grid
  auto make_cdf = [&](const std::function<double(double)>& inner) {
    const int grid_n = 4096;
    const double x_lo = std::log(1e-8), x_hi = std::log(40.0);
    auto xs = std::make_shared<std::vector<double>>();
    auto fs = std::make_shared<std::vector<double>>();
    xs->reserve(grid_n + 1);
    fs->reserve(grid_n + 1);
    double cum = 0.0;
    double prev_val = 0.0;
    for (int i = 0; i <= grid_n; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / grid_n;
      const double s = std::exp(x);
      const double val = inner(s) * ml_pdf(f_alpha, s) * s;  // integrand in x
      if (i > 0) cum += 0.5 * (val + prev_val) * (x_hi - x_lo) / grid_n;
      prev_val = val;
      xs->push_back(x);
      fs->push_back(cum);
    }
    const double total = fs->back();
    if (std::fabs(total - 1.0) > 5e-3) {
      throw numeric_error("diversity-rep: route-B density does not normalize", total);
    }
    return [xs, fs, total](double z) {
      const double x = std::log(std::max(z, 1e-300));
      if (x <= xs->front()) return 0.0;
      if (x >= xs->back()) return 1.0;
      const std::size_t hi =
          std::upper_bound(xs->begin(), xs->end(), x) - xs->begin();
      const double w = (x - (*xs)[hi - 1]) / ((*xs)[hi] - (*xs)[hi - 1]);
      return (((*fs)[hi - 1] * (1.0 - w) + (*fs)[hi] * w)) / total;
    };
  };

  QuadOptions inner_opt;
  inner_opt.rel_tol = 1e-8;
  inner_opt.max_panels = 1024;

  struct Case {
    std::string label;
    TiltFunction tilt;
    std::function<double(double)> inner;
  };
  std::vector<Case> cases;
  cases.push_back({"unit", TiltFunction::unit(beta), [](double) { return 1.0; }});
  {
    const double lam = prm.lambda.value_or(1.0);
    const double norm = ml_function(beta, lam);
    cases.push_back({"ml-lambda=" + detail::fmt_param(lam), TiltFunction::ml_lambda(beta, lam),
                     [&, lam, norm](double s) {
                       return ml_function(ratio, lam * std::pow(s, b / a)) / norm;
                     }});
  }
  {
    const double zeta = prm.zeta.value_or(1.0);
    const double lam = std::pow(zeta, 1.0 / b);
    cases.push_back({"gg-zeta=" + detail::fmt_param(zeta), TiltFunction::gg_zeta(beta, zeta, 0),
                     [&, zeta, lam](double s) {
                       const double c = lam * std::pow(s, -1.0 / a);
                       return std::exp(zeta) *
                              integrate_positive_axis(
                                  [&](double w) {
                                    const double tq = std::pow(w, -1.0 / ratio.value());
                                    return std::exp(-c * std::pow(tq, 1.0 / a)) *
                                           ml_pdf(f_ratio, w);
                                  },
                                  inner_opt);
                     }});
  }

  int case_idx = 0;
  for (const auto& cs : cases) {
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("diversity-rep-" + cs.label));
    const std::vector<double> zs = route_a(cs.tilt, rng);
    const auto cdf = make_cdf(cs.inner);
    const double p = ks_one_sample(zs, cdf);
    ExperimentReport rep;
    rep.name = "diversity-rep/" + cs.label;
    rep.statistic = p;
    rep.p_value = p;
    rep.n_samples = samples;
    rep.pass = p > 0.01;
    rep.seed = prm.seed;
    rep.runtime_ms = t.ms();
    out.push_back(rep);

    if (case_idx == 0) {  // unit tilt: E[Z] equals the ML(alpha,0) mean
      double mean = 0.0, sq = 0.0;
      for (double z : zs) {
        mean += z;
        sq += z * z;
      }
      mean /= samples;
      sq = sq / samples - mean * mean;
      const double se = std::sqrt(std::max(sq, 1e-300) / samples);
      const double target = 1.0 / std::tgamma(1.0 + a);
      ExperimentReport mrep;
      mrep.name = "diversity-rep/unit-mean";
      mrep.statistic = mean;
      mrep.abs_error = std::fabs(mean - target);
      mrep.n_samples = samples;
      mrep.pass = mrep.abs_error <= 3.0 * se;
      mrep.seed = prm.seed;
      mrep.runtime_ms = t.ms();
      out.push_back(mrep);
    }
    ++case_idx;
  }
  return out;
}

// --- fixed-point: the distributional fixed points of the fragmentation
//     diversity, both scalings, with beta = 0 degenerate cases.
inline std::vector<ExperimentReport> fixed_point(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const long samples = prm.samples.value_or(10000);
  const int sticks = prm.sticks.value_or(2000);
  std::vector<std::pair<double, double>> ab_pairs;
  if (prm.alpha || prm.beta) {
    ab_pairs.emplace_back(prm.alpha.value_or(0.6), prm.beta.value_or(0.3));
  } else {
    ab_pairs = {{0.6, 0.3}, {0.6, 0.0}};
  }
  std::vector<int> ells = {1, 2};

  for (const auto& [a, b] : ab_pairs) {
    const StableIndex alpha(a);
    for (int ell : ells) {
      for (int variant = 1; variant <= 2; ++variant) {
        const std::string label = "fixed-point[a=" + detail::fmt_param(a) +
                                  ",b=" + detail::fmt_param(b) + ",l=" + std::to_string(ell) +
                                  ",v" + std::to_string(variant) + "]";
        detail::Timer t;
        RngStream rng(prm.seed, detail::fnv1a(label));
        const double theta_z = (variant == 1) ? ell * a - b : ell - b;
        std::vector<double> lhs(static_cast<std::size_t>(samples));
        for (long i = 0; i < samples; ++i) lhs[static_cast<std::size_t>(i)] = sample_ml(alpha, theta_z, rng);
        std::vector<double> rhs(static_cast<std::size_t>(samples));
        double mean_w = 0.0, sq_w = 0.0;
        for (long i = 0; i < samples; ++i) {
          const GemDraw sticks_draw = sample_gem_sticks(b, theta_z, sticks, rng);
          double total = 0.0;
          double weight_sum = 0.0;
          for (double p : sticks_draw.sticks) {
            double factor = 1.0;
            for (int iw = 1; iw <= ell; ++iw) {
              if (variant == 1) {
                // alpha-scale chain: each step tilts theta by alpha
                factor *= std::pow(rng.beta(-b + iw * a, 1.0 - a), a);
              } else {
                // unit-scale chain: each step tilts theta by one, so the
                // j-th factor is Beta((theta + j - 1 + alpha)/alpha, (1-alpha)/alpha)
                factor *= rng.beta((-b + (iw - 1.0) + a) / a, (1.0 - a) / a);
              }
            }
            const double w = std::pow(p, a) * factor;
            weight_sum += w;
            total += w * sample_ml(alpha, theta_z, rng);
          }
          rhs[static_cast<std::size_t>(i)] = total;
          mean_w += weight_sum;
          sq_w += weight_sum * weight_sum;
        }
        mean_w /= samples;
        sq_w = sq_w / samples - mean_w * mean_w;
        const double se = std::sqrt(std::max(sq_w, 1e-300) / samples);
        const double ks_p = ks_two_sample(lhs, rhs);
        ExperimentReport rep;
        rep.name = label;
        rep.statistic = mean_w;
        rep.p_value = ks_p;
        rep.abs_error = std::fabs(mean_w - 1.0);
        rep.n_samples = samples;
        rep.pass = (rep.abs_error <= 3.0 * se) && (ks_p > 0.01);
        rep.seed = prm.seed;
        rep.runtime_ms = t.ms();
        out.push_back(rep);
      }
    }
  }
  return out;
}

// --- brownian-sizebias: explicit size-biased sticks of PD(1/2 | s^{-2}/2).
inline std::vector<ExperimentReport> brownian_sizebias(const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  const double s = prm.s.value_or(1.0);
  const long samples = prm.samples.value_or(20000);
  const int n = prm.n.value_or(4);

  {  // telescoping partial sums
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("brownian-telescope"));
    double defect = 0.0;
    for (int rep = 0; rep < 16; ++rep) {
      BrownianSticks sticks(s);
      double sum = 0.0;
      for (std::size_t j = 1; j <= 1000; ++j) sum += sticks.stick(j, rng);
      defect = std::max(defect, std::fabs(sum - sticks.covered(1000)));
    }
    out.push_back(deterministic_report("brownian-sizebias/telescoping", defect, 1e-12, t,
                                       prm.seed, 16));
  }
  {  // first-stick mean, two independent streams agree within 3 SE
    detail::Timer t;
    RngStream rng1(prm.seed, detail::fnv1a("brownian-mean-1"));
    RngStream rng2(prm.seed, detail::fnv1a("brownian-mean-2"));
    double m1 = 0.0, m2 = 0.0, v1 = 0.0, v2 = 0.0;
    for (long i = 0; i < samples; ++i) {
      BrownianSticks s1(s), s2(s);
      const double x1 = s1.stick(1, rng1);
      const double x2 = s2.stick(1, rng2);
      m1 += x1;
      v1 += x1 * x1;
      m2 += x2;
      v2 += x2 * x2;
    }
    m1 /= samples;
    m2 /= samples;
    v1 = v1 / samples - m1 * m1;
    v2 = v2 / samples - m2 * m2;
    const double se = std::sqrt((v1 + v2) / samples);
    ExperimentReport rep;
    rep.name = "brownian-sizebias/first-mass-mean";
    rep.statistic = m1;
    rep.abs_error = std::fabs(m1 - m2);
    rep.n_samples = 2 * samples;
    rep.pass = rep.abs_error <= 3.0 * se;
    rep.seed = prm.seed;
    rep.runtime_ms = t.ms();
    out.push_back(rep);
  }
  {  // paintbox block counts match the conditional block-count law
    detail::Timer t;
    RngStream rng(prm.seed, detail::fnv1a("brownian-blocks"));
    const double y = 0.5 / (s * s);
    const StableDensity f_half(StableIndex(0.5));
    const TiltedRatioTable table(make_stable_density(StableIndex(0.5)), y, n);
    const BlocksTable blocks(StableIndex(0.5), n);
    std::map<std::string, double> probs;
    for (int k = 1; k <= n; ++k) {
      probs[std::to_string(k)] = table.at(n, k) * blocks.at(n, k);
    }
    std::map<std::string, long> counts;
    for (long i = 0; i < samples; ++i) {
      BrownianSticks sticks(s);
      counts[std::to_string(sticks.paintbox(n, rng).num_blocks())] += 1;
    }
    const GofResult g = chi_square_gof(counts, probs, samples);
    out.push_back(gof_report("brownian-sizebias/block-counts", g, samples, prm.seed, t.ms()));
  }
  return out;
}

}  // namespace experiments

// Transcript of the explicit generalized-gamma dual construction: builds the
// dependent pair, coagulates, and chi-squares every margin against its
// predicted law (fixed zeta and gamma-randomized theta routes).
inline std::vector<ExperimentReport> gg_dual_demo(StableIndex beta, StableIndex alpha,
                                                  double zeta, int m, int n,
                                                  long samples = 100000,
                                                  std::uint64_t seed = 0) {
  VerifyParams prm;
  prm.seed = seed;
  prm.alpha = alpha.value();
  prm.beta = beta.value();
  prm.zeta = zeta;
  prm.m = m;
  prm.n = n;
  prm.samples = samples;
  return experiments::gg_duality(prm);
}

// ---------------------------------------------------------------------------
// Registry and suite runner
// ---------------------------------------------------------------------------

struct ExperimentEntry {
  std::string name;
  std::vector<ExperimentReport> (*fn)(const VerifyParams&);
  const char* description;
};

inline const std::vector<ExperimentEntry>& experiment_registry() {
  static const std::vector<ExperimentEntry> registry = {
      {"special-fn", &experiments::special_fn,
       "Laplace/moment/recurrence checks of the special-function layer"},
      {"eppf-normalization", &experiments::eppf_normalization,
       "every EPPF evaluator sums to 1 over partitions of [n], n <= 6"},
      {"blocks-composition", &experiments::blocks_composition,
       "block-count composition identity across nested indices"},
      {"pitman-moments", &experiments::pitman_moments,
       "Gibbs-weight moment identity behind the PD fragmentation duality"},
      {"duality-pd", &experiments::duality_pd,
       "FRAG of PD(beta,theta) partitions matches PD(alpha,theta), seeded calibration"},
      {"frag-composition", &experiments::frag_composition,
       "two-step vs one-step fragmentation equivalence"},
      {"frag-disintegration", &experiments::frag_disintegration,
       "conditional fragmented EPPF disintegrates to PD(alpha,0)"},
      {"hermite", &experiments::hermite,
       "Hermite-function closed forms vs quadrature at beta = 1/2"},
      {"dependent-coag", &experiments::dependent_coag,
       "dependent coagulation margins and independence"},
      {"gg-duality", &experiments::gg_duality,
       "generalized-gamma dual construction recovers PD margins"},
      {"diversity-rep", &experiments::diversity_rep,
       "alpha-diversity representation: sampled vs quadrature CDF"},
      {"fixed-point", &experiments::fixed_point,
       "distributional fixed points of the fragmentation diversity"},
      {"brownian-sizebias", &experiments::brownian_sizebias,
       "explicit Brownian size-biased sticks of PD(1/2 | s^-2/2)"},
  };
  return registry;
}

inline std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& e : experiment_registry()) names.push_back(e.name);
  return names;
}

inline std::vector<ExperimentReport> run_experiment(const std::string& name,
                                                    const VerifyParams& prm) {
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return e.fn(prm);
  }
  throw domain_error("run_suite: unknown experiment '" + name + "'");
}

// Runs the named experiments (empty list -> empty report) with per-experiment
// derived streams; aggregation order follows the argument order.
inline std::vector<ExperimentReport> run_suite(const std::vector<std::string>& names,
                                               const VerifyParams& prm) {
  std::vector<ExperimentReport> out;
  for (const auto& name : names) {
    const std::vector<ExperimentReport> reps = run_experiment(name, prm);
    out.insert(out.end(), reps.begin(), reps.end());
  }
  return out;
}

inline std::string format_g17(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV schema: name,statistic,p_value,abs_error,n_samples,pass,seed,runtime_ms.
// Timings default to zero so identical seeds give byte-identical output.
inline std::string reports_to_csv(const std::vector<ExperimentReport>& reports,
                                  bool with_runtime = false) {
  std::string out = "name,statistic,p_value,abs_error,n_samples,pass,seed,runtime_ms\n";
  for (const auto& r : reports) {
    out += r.name;
    out += ',';
    out += format_g17(r.statistic);
    out += ',';
    out += format_g17(r.p_value);
    out += ',';
    out += format_g17(r.abs_error);
    out += ',';
    out += std::to_string(r.n_samples);
    out += ',';
    out += r.pass ? "true" : "false";
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(with_runtime ? r.runtime_ms : 0);
    out += '\n';
  }
  return out;
}

}  // namespace gibbspart
