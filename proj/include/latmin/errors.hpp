#pragma once

#include <stdexcept>
#include <string>

namespace latmin {

// Basis is rank deficient (or numerically indistinguishable from it).
class degenerate_lattice_error : public std::runtime_error {
 public:
  explicit degenerate_lattice_error(const std::string& what)
      : std::runtime_error(what) {}
};

// An enumeration or search exceeded its node budget.
class resource_limit_error : public std::runtime_error {
 public:
  resource_limit_error(const std::string& what, std::uint64_t budget)
      : std::runtime_error(what + " (budget " + std::to_string(budget) + ")"),
        budget_(budget) {}
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t budget_;
};

}  // namespace latmin
