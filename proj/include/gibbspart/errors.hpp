#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gibbspart {

// Parameter outside its documented domain (bad index, malformed partition, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A series or quadrature failed to converge. Carries the partial value when
// one is available.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what,
                         std::optional<double> partial = std::nullopt)
      : std::runtime_error(what), partial_(partial) {}
  std::optional<double> partial() const { return partial_; }

 private:
  std::optional<double> partial_;
};

// Combinatorial guard (e.g. enumerating set partitions past the Bell cap).
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rejection sampler's acceptance rate collapsed; change parameters.
class efficiency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gibbspart
