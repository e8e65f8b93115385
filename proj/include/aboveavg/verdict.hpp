#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aboveavg/rational.hpp"

namespace aboveavg {

/// Which route a solver took to reach its answer.
enum class Branch { yes_certificate, kernel_exhaustive, approx, exact, held_karp };

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::yes_certificate: return "yes-certificate";
    case Branch::kernel_exhaustive: return "kernel+exhaustive";
    case Branch::approx: return "approx";
    case Branch::exact: return "exact";
    case Branch::held_karp: return "held-karp";
  }
  return "unknown";
}

/// Yes(witness, achieved weight) or No(optimum weight, optimal witness).
/// Weights are always in the units of the instance handed to the solver.
template <typename Witness>
struct Verdict {
  bool yes = false;
  Witness witness;
  Weight weight = 0;
  Branch branch = Branch::yes_certificate;

  static Verdict accept(Witness w, Weight achieved, Branch b) { return {true, std::move(w), achieved, b}; }
  static Verdict reject(Witness w, Weight optimum, Branch b) { return {false, std::move(w), optimum, b}; }
};

/// Thrown when an exhaustive search or subset DP would exceed its variable guard.
class ResourceGuardError : public std::runtime_error {
 public:
  ResourceGuardError(std::string_view what, std::size_t variables, std::size_t guard)
      : std::runtime_error(std::string(what) + ": " + std::to_string(variables) +
                           " variables exceed the guard of " + std::to_string(guard)),
        variables_(variables),
        guard_(guard) {}

  std::size_t variables() const { return variables_; }
  std::size_t guard() const { return guard_; }

 private:
  std::size_t variables_;
  std::size_t guard_;
};

}  // namespace aboveavg
