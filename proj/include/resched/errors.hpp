#pragma once

#include <stdexcept>
#include <string>

namespace resched {

// Raised when an iterative randomized procedure exhausts its retry budget;
// the message carries the diagnostics (event tallies, last violation).
class NonTerminatedError : public std::runtime_error {
 public:
  explicit NonTerminatedError(const std::string& what)
      : std::runtime_error(what) {}
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, long long partial)
      : std::runtime_error(what), partial_count(partial) {}
  long long partial_count = 0;
};

}  // namespace resched
