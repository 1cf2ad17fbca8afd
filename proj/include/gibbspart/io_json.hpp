#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gibbspart/errors.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/verify.hpp"

namespace gibbspart {

// Canonical JSON forms: a SetPartition is an array of arrays of 1-based
// integers in least-element order; a MassPartition is {"weights":[...],"tail":x}.

inline nlohmann::json to_json(const SetPartition& p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& b : p.blocks) j.push_back(b);
  return j;
}

inline SetPartition set_partition_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw domain_error("SetPartition JSON must be an array of arrays");
  std::vector<std::vector<int>> blocks;
  int n = 0;
  for (const auto& jb : j) {
    if (!jb.is_array()) throw domain_error("SetPartition JSON must be an array of arrays");
    std::vector<int> b;
    for (const auto& e : jb) {
      b.push_back(e.get<int>());
      n = std::max(n, b.back());
    }
    blocks.push_back(std::move(b));
  }
  return SetPartition(n, std::move(blocks));
}

inline nlohmann::json to_json(const MassPartition& m) {
  return nlohmann::json{{"weights", m.weights}, {"tail", m.tail}};
}

inline MassPartition mass_partition_from_json(const nlohmann::json& j) {
  MassPartition m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.tail = j.at("tail").get<double>();
  m.validate();
  return m;
}

inline nlohmann::json to_json(const ExperimentReport& r, bool with_runtime = false) {
  nlohmann::json j{{"name", r.name},        {"statistic", r.statistic},
                   {"n_samples", r.n_samples}, {"pass", r.pass},
                   {"seed", r.seed},        {"runtime_ms", with_runtime ? r.runtime_ms : 0}};
  if (!std::isnan(r.p_value)) j["p_value"] = r.p_value;
  if (!std::isnan(r.abs_error)) j["abs_error"] = r.abs_error;
  return j;
}

}  // namespace gibbspart
