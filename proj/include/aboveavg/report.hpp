#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aboveavg/lin2.hpp"
#include "aboveavg/ordering.hpp"
#include "aboveavg/rational.hpp"

namespace aboveavg {

/// Result of one command, printed as key=value lines in a fixed key order.
struct RunReport {
  std::string command;
  std::size_t num_vars = 0;
  std::size_t num_constraints = 0;
  Weight total_weight = 0;
  Rational average;
  std::optional<Weight> k;
  std::optional<Rational> eps;
  std::string verdict;
  std::string branch;
  std::optional<Weight> achieved;
  std::optional<Weight> optimum;
  std::optional<Rational> threshold;
  std::string witness;
  std::vector<std::pair<std::string, std::string>> extra;
  std::int64_t elapsed_ms = 0;

  std::string serialize(bool with_witness = true) const {
    std::ostringstream os;
    os << "command=" << command << '\n';
    os << "num_vars=" << num_vars << '\n';
    os << "num_constraints=" << num_constraints << '\n';
    os << "total_weight=" << total_weight << '\n';
    os << "average=" << average << '\n';
    if (k) os << "k=" << *k << '\n';
    if (eps) os << "eps=" << *eps << '\n';
    os << "verdict=" << verdict << '\n';
    if (!branch.empty()) os << "branch=" << branch << '\n';
    if (achieved) os << "achieved=" << *achieved << '\n';
    if (optimum) os << "optimum=" << *optimum << '\n';
    if (threshold) os << "threshold=" << *threshold << '\n';
    if (with_witness && !witness.empty()) os << "witness=" << witness << '\n';
    for (const auto& [key, value] : extra) os << key << '=' << value << '\n';
    os << "elapsed_ms=" << elapsed_ms << '\n';
    return os.str();
  }
};

inline std::string format_witness(const Assignment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ' ';
    s += a[i] ? '1' : '0';
  }
  return s;
}

/// 1-based variable indices in order of position.
inline std::string format_witness(const Ordering& phi) {
  std::string s;
  for (std::size_t i = 0; i < phi.sequence.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(phi.sequence[i] + 1);
  }
  return s;
}

}  // namespace aboveavg
