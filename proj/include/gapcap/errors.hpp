#pragma once

#include <stdexcept>
#include <string>

namespace gapcap {

// A tolerance budget that cannot be satisfied.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A fit that failed on data grounds (non-decaying tail, unresolved window,
// component collapse) rather than on bad arguments.
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gapcap
