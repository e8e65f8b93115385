#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace aboveavg {

using Var = std::uint32_t;

/// Sorted, duplicate-free set of variable indices; the empty monomial is the
/// constant term.
using Monomial = std::vector<Var>;

/// In-place unnormalized Walsh-Hadamard transform. On return,
/// values[S] = sum_b values_in[b] * (-1)^{popcount(b & S)}.
template <typename T>
void walsh_hadamard(std::span<T> values) {
  const std::size_t n = values.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("transform length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        T a = values[j];
        T b = values[j + h];
        values[j] = a + b;
        values[j + h] = a - b;
      }
    }
  }
}

/// Monomial whose local bit positions are the set bits of mask.
inline Monomial monomial_from_mask(std::uint64_t mask) {
  Monomial m;
  for (Var i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1) m.push_back(i);
  }
  return m;
}

/// Multilinear polynomial over +-1 valued variables with exact coefficients.
/// Zero coefficients are never stored.
template <typename Coeff>
class MultilinearPolynomial {
 public:
  using TermMap = std::map<Monomial, Coeff>;

  void add_term(Monomial monomial, const Coeff& coeff) {
    std::sort(monomial.begin(), monomial.end());
    if (std::adjacent_find(monomial.begin(), monomial.end()) != monomial.end()) {
      throw std::invalid_argument("monomial has a repeated variable");
    }
    auto [it, inserted] = terms_.try_emplace(std::move(monomial), coeff);
    if (!inserted) it->second += coeff;
    if (it->second == Coeff{}) terms_.erase(it);
  }

  MultilinearPolynomial& operator+=(const MultilinearPolynomial& other) {
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }

  /// Every coefficient multiplied by factor.
  MultilinearPolynomial scaled(const Coeff& factor) const {
    MultilinearPolynomial out;
    if (factor == Coeff{}) return out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * factor);
    return out;
  }

  /// Local variable i renamed to mapping[i].
  MultilinearPolynomial renamed(std::span<const Var> mapping) const {
    MultilinearPolynomial out;
    for (const auto& [m, c] : terms_) {
      Monomial g;
      g.reserve(m.size());
      for (Var v : m) g.push_back(mapping[v]);
      out.add_term(std::move(g), c);
    }
    return out;
  }

  Coeff coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff{} : it->second;
  }

  Coeff constant_term() const { return coefficient({}); }

  /// Evaluates at a point of {-1,+1}^n given as signs (+1 or -1).
  Coeff evaluate(std::span<const int> signs) const {
    Coeff total{};
    for (const auto& [m, c] : terms_) {
      int s = 1;
      for (Var v : m) s *= signs[v];
      total += (s > 0) ? c : -c;
    }
    return total;
  }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.size());
    return d;
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  friend bool operator==(const MultilinearPolynomial&, const MultilinearPolynomial&) = default;

 private:
  TermMap terms_;
};

}  // namespace aboveavg
