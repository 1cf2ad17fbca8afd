#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gibbspart/errors.hpp"
#include "gibbspart/stable.hpp"

namespace gibbspart {

// Unordered multiset of block sizes, kept sorted descending.
class Composition {
 public:
  Composition() = default;
  explicit Composition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    for (int s : sizes_) {
      if (s < 1) throw domain_error("Composition: sizes must be >= 1");
    }
    std::sort(sizes_.begin(), sizes_.end(), std::greater<int>());
  }

  int n() const {
    int s = 0;
    for (int x : sizes_) s += x;
    return s;
  }
  int k() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  // One part of the given size grows by one.
  Composition with_incremented(int size) const {
    std::vector<int> s = sizes_;
    auto it = std::find(s.begin(), s.end(), size);
    if (it == s.end()) throw domain_error("Composition: no part of requested size");
    *it += 1;
    return Composition(std::move(s));
  }

  Composition with_new_singleton() const {
    std::vector<int> s = sizes_;
    s.push_back(1);
    return Composition(std::move(s));
  }

  bool operator<(const Composition& o) const { return sizes_ < o.sizes_; }
  bool operator==(const Composition& o) const { return sizes_ == o.sizes_; }

  // Number of set partitions of [n] sharing this block-size multiset.
  double partition_count() const {
    double lc = std::lgamma(n() + 1.0);
    for (int s : sizes_) lc -= std::lgamma(s + 1.0);
    std::map<int, int> mult;
    for (int s : sizes_) mult[s] += 1;
    for (auto& [sz, m] : mult) lc -= std::lgamma(m + 1.0);
    return std::round(std::exp(lc));
  }

 private:
  std::vector<int> sizes_;
};

// Partition of [n] into disjoint blocks, canonicalized so blocks are listed
// in order of least element and each block's elements are increasing.
struct SetPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  SetPartition() = default;
  SetPartition(int n_, std::vector<std::vector<int>> blocks_) : n(n_), blocks(std::move(blocks_)) {
    canonicalize();
    validate();
  }

  // Labels give the block of each item 1..n (any label values).
  static SetPartition from_labels(const std::vector<int>& labels) {
    SetPartition p;
    p.n = static_cast<int>(labels.size());
    std::map<int, int> seen;
    for (int i = 0; i < p.n; ++i) {
      auto [it, inserted] = seen.emplace(labels[i], static_cast<int>(p.blocks.size()));
      if (inserted) p.blocks.emplace_back();
      p.blocks[it->second].push_back(i + 1);
    }
    return p;
  }

  void canonicalize() {
    for (auto& b : blocks) {
      if (b.empty()) throw domain_error("SetPartition: empty block");
      std::sort(b.begin(), b.end());
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  void validate() const {
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    int count = 0;
    int prev_least = 0;
    for (const auto& b : blocks) {
      if (b.empty()) throw domain_error("SetPartition: empty block");
      if (b.front() <= prev_least) throw domain_error("SetPartition: blocks not in least-element order");
      prev_least = b.front();
      for (int e : b) {
        if (e < 1 || e > n || seen[e]) throw domain_error("SetPartition: not a partition of [n]");
        seen[e] = 1;
        ++count;
      }
    }
    if (count != n) throw domain_error("SetPartition: blocks do not cover [n]");
  }

  int num_blocks() const { return static_cast<int>(blocks.size()); }

  Composition composition() const {
    std::vector<int> sizes;
    sizes.reserve(blocks.size());
    for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
    return Composition(std::move(sizes));
  }

  // Restricted-growth-string key; canonical per partition, handy for binning.
  std::string rgs_key() const {
    std::vector<int> label(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      for (int e : blocks[j]) label[e] = static_cast<int>(j);
    }
    std::string key;
    key.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) key.push_back(static_cast<char>('a' + label[i]));
    return key;
  }

  bool operator==(const SetPartition& o) const { return n == o.n && blocks == o.blocks; }
};

inline Composition to_composition(const SetPartition& p) { return p.composition(); }

inline std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw domain_error("bell_number: supported for 0 <= n <= 25");
  std::vector<std::vector<std::uint64_t>> tri;
  tri.push_back({1});
  for (int i = 1; i < n; ++i) {
    std::vector<std::uint64_t> row;
    row.push_back(tri.back().back());
    for (std::uint64_t x : tri.back()) row.push_back(row.back() + x);
    tri.push_back(std::move(row));
  }
  return n == 0 ? 1 : tri.back().back();
}

inline constexpr int kEnumerationCap = 12;  // Bell(12) = 4,213,597

// Visits every set partition of [n] once, in restricted-growth-string order.
// The visitor receives the RGS labels (0-based block index per item).
template <class F>
inline void enumerate_rgs(int n, F&& visit) {
  if (n < 1) throw domain_error("enumerate_set_partitions: n must be >= 1");
  if (n > kEnumerationCap) {
    throw resource_error("enumerate_set_partitions: n exceeds the Bell-growth cap of 12");
  }
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  for (;;) {
    visit(const_cast<const std::vector<int>&>(a));
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
      if (a[i] <= mx) break;
    }
    if (i == 0) return;
    a[i] += 1;
    for (int j = i + 1; j < n; ++j) a[j] = 0;
  }
}

template <class F>
inline void enumerate_set_partitions(int n, F&& visit) {
  enumerate_rgs(n, [&](const std::vector<int>& a) { visit(SetPartition::from_labels(a)); });
}

inline std::vector<SetPartition> all_set_partitions(int n) {
  std::vector<SetPartition> out;
  enumerate_set_partitions(n, [&](const SetPartition& p) { out.push_back(p); });
  return out;
}

// Element of P_infty truncated for computation: nonincreasing weights plus an
// explicit tail mass, with weights + tail summing to one.
struct MassPartition {
  std::vector<double> weights;
  double tail = 0.0;

  void validate() const {
    double sum = tail;
    if (tail < -1e-12) throw domain_error("MassPartition: negative tail");
    double prev = 1.0 + 1e-12;
    for (double w : weights) {
      if (!(w > 0.0)) throw domain_error("MassPartition: weights must be positive");
      if (w > prev * (1.0 + 1e-12)) throw domain_error("MassPartition: weights not nonincreasing");
      prev = w;
      sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw domain_error("MassPartition: weights + tail must sum to 1");
  }
};

// Ranked re-arrangement: sort nonincreasing, drop zeros, keep the tail.
// Inputs must already sum to one within 1e-6; the output is renormalized so
// the stored invariant holds exactly.
inline MassPartition rank_masses(std::vector<double> raw, double tail) {
  double sum = tail;
  for (double w : raw) {
    if (w < 0.0) throw domain_error("rank_masses: negative mass");
    sum += w;
  }
  if (tail < 0.0) throw domain_error("rank_masses: negative tail");
  if (std::fabs(sum - 1.0) > 1e-6) throw domain_error("rank_masses: masses + tail must sum to 1");
  MassPartition m;
  m.weights.reserve(raw.size());
  for (double w : raw) {
    if (w > 0.0) m.weights.push_back(w / sum);
  }
  std::sort(m.weights.begin(), m.weights.end(), std::greater<double>());
  m.tail = tail / sum;
  m.validate();
  return m;
}

// Finite-eps estimator of the alpha-diversity L_1:
//   Gamma(1-alpha) eps^alpha #{i : w_i >= eps}.
// The counting function of a mass partition with diversity Z satisfies
// N(eps) ~ Z eps^{-alpha} / Gamma(1-alpha) (the Levy measure of the driving
// subordinator integrates to x^{-alpha}/Gamma(1-alpha)), so this matches the
// block-count estimator K_n / n^alpha in the limit.
inline double diversity_estimate(const MassPartition& m, StableIndex alpha, double eps) {
  if (!(eps > 0.0)) throw domain_error("diversity_estimate: eps must be > 0");
  const double a = alpha.value();
  std::size_t count = 0;
  for (double w : m.weights) {
    if (w >= eps) ++count;
  }
  return std::pow(eps, a) * static_cast<double>(count) * std::tgamma(1.0 - a);
}

}  // namespace gibbspart
