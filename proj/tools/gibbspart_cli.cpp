// Command-line front end: densities, EPPF tables, samplers, fragmentation /
// coagulation operators, and the verification suite.
//
// Exit codes: 0 success, 1 experiment failure, 2 usage or domain error,
// 3 numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbspart/gibbspart.hpp"
#include "gibbspart/io_json.hpp"

using namespace gibbspart;
using nlohmann::json;

namespace {

std::string g17(double v) { return format_g17(v); }

struct Output {
  std::string path;  // empty = stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::fputs(text.c_str(), stdout);
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw domain_error("cannot open output path: " + path);
      out << text;
    }
  }
};

struct EppfSpec {
  std::string family = "pd";
  double alpha = 0.5, beta = 0.25, theta = 0.0, y = 1.0, zeta = 1.0, lambda = 1.0;
  int m = 0;

  std::unique_ptr<Eppf> build(int n_max) const {
    if (family == "pd") return std::make_unique<PdEppf>(StableIndex(alpha), theta);
    if (family == "gg") {
      return std::make_unique<GibbsEppf>(GibbsWeights::gen_gamma(StableIndex(alpha), zeta, m, n_max));
    }
    if (family == "ml") {
      return std::make_unique<GibbsEppf>(GibbsWeights::mittag_leffler(StableIndex(alpha), lambda, n_max));
    }
    if (family == "cond") {
      return std::make_unique<CondEppf>(make_stable_density(StableIndex(alpha)), y, n_max);
    }
    if (family == "fragcond") {
      return std::make_unique<FragCondEppf>(StableIndex(alpha),
                                            make_stable_density(StableIndex(beta)), y, n_max);
    }
    if (family == "fragpd") {
      return std::make_unique<FragEppf>(StableIndex(alpha),
                                        GibbsWeights::pd(StableIndex(beta), theta, n_max));
    }
    if (family == "fraggg") {
      return std::make_unique<FragEppf>(StableIndex(alpha),
                                        GibbsWeights::gen_gamma(StableIndex(beta), zeta, m, n_max));
    }
    throw domain_error("unknown EPPF family: " + family);
  }
};

void add_eppf_options(CLI::App* cmd, EppfSpec& spec) {
  cmd->add_option("--family", spec.family,
                  "EPPF family: pd|gg|ml|cond|fragcond|fragpd|fraggg (default pd)");
  cmd->add_option("--alpha", spec.alpha, "stable index alpha in (0,1)");
  cmd->add_option("--beta", spec.beta, "fragmentation base index beta < alpha");
  cmd->add_option("--theta", spec.theta, "PD theta parameter (> -alpha)");
  cmd->add_option("--y", spec.y, "conditioning abscissa for cond/fragcond");
  cmd->add_option("--zeta", spec.zeta, "generalized gamma zeta (> 0)");
  cmd->add_option("--lambda", spec.lambda, "Mittag-Leffler lambda (>= 0)");
  cmd->add_option("--m", spec.m, "generalized gamma size-bias order (0 or 1)");
}

int run_density(const std::string& kind, double alpha, double theta, long j, int n, int k,
                const std::vector<double>& xs, const Output& out, const std::string& format) {
  const StableIndex a(alpha);
  std::string csv = "x,value\n";
  json rows = json::array();
  std::shared_ptr<const StableDensity> dens;
  if (kind == "stable" || kind == "ml" || kind == "gml" || kind == "tilted") {
    dens = make_stable_density(a);
  }
  for (double x : xs) {
    double v = 0.0;
    if (kind == "stable") {
      v = (*dens)(x);
    } else if (kind == "ml") {
      v = ml_pdf(*dens, x);
    } else if (kind == "gml") {
      v = gml_pdf(*dens, theta, x);
    } else if (kind == "tilted") {
      v = tilted_y_pdf(*dens, n, k, x);
    } else if (kind == "mlfn") {
      v = ml_function(a, x);
    } else if (kind == "gmlfn") {
      v = gml_function(a, theta, j, x);
    } else if (kind == "hermite") {
      v = hermite_fn(theta, x);  // theta carries q for this kind
    } else {
      throw domain_error("unknown density kind: " + kind);
    }
    csv += g17(x) + "," + g17(v) + "\n";
    rows.push_back({{"x", x}, {"value", v}});
  }
  out.write(format == "json" ? rows.dump(2) + "\n" : csv);
  return 0;
}

int run_eppf(const EppfSpec& spec, int n, const Output& out, const std::string& format) {
  const auto eppf = spec.build(std::max(n, 1));
  std::string csv = "partition,k,value\n";
  json rows = json::array();
  std::map<std::vector<int>, double> cache;
  enumerate_set_partitions(n, [&](const SetPartition& p) {
    const Composition c = p.composition();
    auto it = cache.find(c.sizes());
    if (it == cache.end()) it = cache.emplace(c.sizes(), eppf->eval(c)).first;
    csv += "\"" + to_json(p).dump() + "\"," + std::to_string(p.num_blocks()) + "," +
           g17(it->second) + "\n";
    rows.push_back({{"partition", to_json(p)}, {"k", p.num_blocks()}, {"value", it->second}});
  });
  out.write(format == "json" ? rows.dump(2) + "\n" : csv);
  return 0;
}

int run_sample(const std::string& what, const EppfSpec& spec, int n, long samples, int count,
               std::uint64_t seed, const Output& out) {
  RngStream rng(seed, 1);
  std::ostringstream os;
  json meta{{"what", what},     {"seed", seed},          {"samples", samples},
            {"family", spec.family}, {"alpha", spec.alpha}, {"n", n},
            {"count", count},   {"tail_policy", "explicit tail mass carried per draw"}};
  os << meta.dump() << "\n";
  if (what == "partition") {
    const auto eppf = spec.build(n);
    PartitionSampler sampler(*eppf);
    for (long i = 0; i < samples; ++i) os << to_json(sampler.draw(n, rng)).dump() << "\n";
  } else if (what == "gem") {
    for (long i = 0; i < samples; ++i) {
      os << to_json(sample_gem(spec.alpha, spec.theta, count, rng)).dump() << "\n";
    }
  } else if (what == "jumps") {
    const StableIndex a(spec.alpha);
    for (long i = 0; i < samples; ++i) {
      const JumpDraw d = sample_stable_jumps(a, count, rng);
      std::vector<double> w(d.jumps.size());
      for (std::size_t q = 0; q < w.size(); ++q) w[q] = d.jumps[q] / d.total;
      os << to_json(rank_masses(std::move(w), d.tail_correction / d.total)).dump() << "\n";
    }
  } else if (what == "pk") {
    const StableIndex a(spec.alpha);
    TiltFunction h = spec.family == "ml" ? TiltFunction::ml_lambda(a, spec.lambda)
                                         : TiltFunction::gg_zeta(a, spec.zeta, spec.m);
    for (long i = 0; i < samples; ++i) {
      os << to_json(sample_pk_tilted(a, h, count, rng).masses).dump() << "\n";
    }
  } else if (what == "stable") {
    const StableIndex a(spec.alpha);
    for (long i = 0; i < samples; ++i) os << g17(sample_stable(a, rng)) << "\n";
  } else if (what == "ml") {
    const StableIndex a(spec.alpha);
    for (long i = 0; i < samples; ++i) os << g17(sample_ml(a, spec.theta, rng)) << "\n";
  } else if (what == "gginv") {
    const StableIndex a(spec.alpha);
    for (long i = 0; i < samples; ++i) {
      os << g17(sample_gg_inverse_lt(a, spec.zeta, spec.m, rng)) << "\n";
    }
  } else {
    throw domain_error("unknown sample target: " + what);
  }
  out.write(os.str());
  return 0;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw domain_error("cannot open input path: " + path);
    in = &file;
  }
  std::vector<json> lines;
  std::string line;
  while (std::getline(*in, line)) {
    if (line.empty()) continue;
    lines.push_back(json::parse(line));
  }
  return lines;
}

int run_frag(double alpha, double beta, const std::string& p_json, const std::string& in_path,
             int reps, std::uint64_t seed, const Output& out) {
  const FragParams fp{StableIndex(alpha), StableIndex(beta)};
  RngStream rng(seed, 2);
  std::vector<SetPartition> inputs;
  if (!p_json.empty()) {
    inputs.push_back(set_partition_from_json(json::parse(p_json)));
  } else {
    for (const auto& j : read_jsonl(in_path)) inputs.push_back(set_partition_from_json(j));
  }
  std::ostringstream os;
  for (const auto& p : inputs) {
    for (int r = 0; r < reps; ++r) os << to_json(frag_set_partition(p, fp, rng)).dump() << "\n";
  }
  out.write(os.str());
  return 0;
}

int run_coag(const std::string& p_json, const std::string& q_json, const std::string& in_path,
             const Output& out) {
  std::ostringstream os;
  if (!p_json.empty() && !q_json.empty()) {
    const SetPartition p = set_partition_from_json(json::parse(p_json));
    const SetPartition q = set_partition_from_json(json::parse(q_json));
    os << to_json(coag_set_partition(p, q)).dump() << "\n";
  } else {
    for (const auto& j : read_jsonl(in_path)) {
      const SetPartition p = set_partition_from_json(j.at("p"));
      const SetPartition q = set_partition_from_json(j.at("q"));
      os << to_json(coag_set_partition(p, q)).dump() << "\n";
    }
  }
  out.write(os.str());
  return 0;
}

int run_verify(std::vector<std::string> names, const VerifyParams& prm, bool list, bool timings,
               const Output& out, const std::string& format) {
  if (list) {
    std::string text;
    for (const auto& e : experiment_registry()) {
      text += e.name + std::string(": ") + e.description + "\n";
    }
    out.write(text);
    return 0;
  }
  if (names.empty()) names = experiment_names();
  const auto reports = run_suite(names, prm);
  if (format == "json") {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(to_json(r, timings));
    out.write(rows.dump(2) + "\n");
  } else {
    out.write(reports_to_csv(reports, timings));
  }
  for (const auto& r : reports) {
    if (!r.pass) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs partitions from stable subordinators: densities, EPPFs, samplers, "
               "fragmentation/coagulation operators and a verification suite"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, format = "csv";
  app.add_option("--out", out_path, "write output to this path instead of stdout");
  app.add_option("--format", format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // density
  auto* density = app.add_subcommand("density", "evaluate densities and special functions");
  std::string kind = "stable";
  EppfSpec dspec;
  long j_order = 0;
  int dn = 2, dk = 1;
  std::vector<double> xs;
  density->add_option("--kind", kind, "stable|ml|gml|tilted|mlfn|gmlfn|hermite");
  density->add_option("--alpha", dspec.alpha, "stable index");
  density->add_option("--theta", dspec.theta, "theta (gml/gmlfn) or Hermite q (hermite)");
  density->add_option("--j", j_order, "gmlfn series order j >= 0");
  density->add_option("--n", dn, "tilted density n");
  density->add_option("--k", dk, "tilted density k");
  density->add_option("--x", xs, "abscissae (repeatable)")->required();

  // eppf
  auto* eppf_cmd = app.add_subcommand("eppf", "print an EPPF table over all partitions of [n]");
  EppfSpec espec;
  int en = 3;
  add_eppf_options(eppf_cmd, espec);
  eppf_cmd->add_option("--n", en, "partition size n (<= 12)")->required();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw partitions or mass partitions");
  EppfSpec sspec;
  std::string what = "partition";
  int sn = 5, count = 1000;
  long samples = 10;
  std::uint64_t seed = 0;
  sample_cmd->add_option("--what", what, "partition|gem|jumps|pk|stable|ml|gginv");
  add_eppf_options(sample_cmd, sspec);
  sample_cmd->add_option("--n", sn, "partition size");
  sample_cmd->add_option("--count", count, "stick/jump truncation per draw");
  sample_cmd->add_option("--samples", samples, "number of draws");
  sample_cmd->add_option("--seed", seed, "rng seed");

  // frag
  auto* frag_cmd = app.add_subcommand("frag", "apply FRAG_{alpha,-beta} to partitions");
  double fa = 0.6, fb = 0.3;
  std::string p_json, in_path;
  int reps = 1;
  std::uint64_t fseed = 0;
  frag_cmd->add_option("--alpha", fa, "fragmentation index alpha")->required();
  frag_cmd->add_option("--beta", fb, "base index beta < alpha")->required();
  frag_cmd->add_option("--p", p_json, "partition JSON (array of arrays, 1-based)");
  frag_cmd->add_option("--in", in_path, "JSONL file of partitions (- for stdin)");
  frag_cmd->add_option("--reps", reps, "fragmentations per input partition");
  frag_cmd->add_option("--seed", fseed, "rng seed");

  // coag
  auto* coag_cmd = app.add_subcommand("coag", "merge blocks of p according to q");
  std::string cp_json, cq_json, cin_path;
  coag_cmd->add_option("--p", cp_json, "partition JSON of [n]");
  coag_cmd->add_option("--q", cq_json, "partition JSON of [#blocks(p)]");
  coag_cmd->add_option("--in", cin_path, "JSONL file of {\"p\":..., \"q\":...} pairs");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run verification experiments");
  std::vector<std::string> names;
  VerifyParams prm;
  bool list = false, timings = false;
  double va = 0, vb = 0, vs = 0, vth = 0, vlam = 0, vz = 0;
  long vsamples = 0;
  int vn = 0, vreps = 0, vsticks = 0;
  verify_cmd->add_option("names", names, "experiment names (default: all)");
  verify_cmd->add_flag("--list", list, "list experiments and exit");
  verify_cmd->add_flag("--timings", timings, "emit wall-clock runtimes (breaks byte-reproducibility)");
  verify_cmd->add_option("--seed", prm.seed, "rng seed");
  auto* oa = verify_cmd->add_option("--alpha", va, "override alpha");
  auto* ob = verify_cmd->add_option("--beta", vb, "override beta");
  auto* os_ = verify_cmd->add_option("--sigma", vs, "override sigma (frag-composition)");
  auto* oth = verify_cmd->add_option("--theta", vth, "override theta");
  auto* olam = verify_cmd->add_option("--lambda", vlam, "override lambda");
  auto* oz = verify_cmd->add_option("--zeta", vz, "override zeta");
  auto* osam = verify_cmd->add_option("--samples", vsamples, "Monte Carlo draws per test");
  auto* on = verify_cmd->add_option("--n", vn, "partition size");
  auto* orep = verify_cmd->add_option("--reps", vreps, "seeded repetitions");
  auto* ost = verify_cmd->add_option("--sticks", vsticks, "stick/jump truncation");

  try {
    app.parse(argc, argv);

    const Output out{out_path};
    if (*density) return run_density(kind, dspec.alpha, dspec.theta, j_order, dn, dk, xs, out, format);
    if (*eppf_cmd) return run_eppf(espec, en, out, format);
    if (*sample_cmd) return run_sample(what, sspec, sn, samples, count, seed, out);
    if (*frag_cmd) return run_frag(fa, fb, p_json, in_path, reps, fseed, out);
    if (*coag_cmd) return run_coag(cp_json, cq_json, cin_path, out);
    if (*verify_cmd) {
      if (oa->count()) prm.alpha = va;
      if (ob->count()) prm.beta = vb;
      if (os_->count()) prm.sigma = vs;
      if (oth->count()) prm.theta = vth;
      if (olam->count()) prm.lambda = vlam;
      if (oz->count()) prm.zeta = vz;
      if (osam->count()) prm.samples = vsamples;
      if (on->count()) prm.n = vn;
      if (orep->count()) prm.reps = vreps;
      if (ost->count()) prm.sticks = vsticks;
      return run_verify(names, prm, list, timings, out, format);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const efficiency_error& e) {
    std::fprintf(stderr, "efficiency error: %s\n", e.what());
    return 3;
  } catch (const domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
