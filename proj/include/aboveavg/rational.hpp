#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace aboveavg {

using Weight = std::int64_t;

class ArithmeticOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace detail {

inline std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw ArithmeticOverflow("exact arithmetic exceeded 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

inline __int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// Exact rational number with a positive denominator, always in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit from integers
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  /// Smallest integer not below this value.
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                   static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                   static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("division by zero");
    return from128(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return from128(-static_cast<__int128>(num_), den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static Rational from128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = detail::narrow(n);
    r.den_ = detail::narrow(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = from128(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// numerator / 2^log2_denominator, normalized so the numerator is odd (or the
/// value is zero with exponent 0).
class DyadicRational {
 public:
  constexpr DyadicRational() = default;
  constexpr DyadicRational(std::int64_t n) : numerator_(n) {}  // NOLINT
  DyadicRational(std::int64_t n, unsigned log2_den) : numerator_(n), log2_den_(log2_den) {
    normalize();
  }

  std::int64_t numerator() const { return numerator_; }
  unsigned log2_denominator() const { return log2_den_; }
  bool is_zero() const { return numerator_ == 0; }
  int sign() const { return (numerator_ > 0) - (numerator_ < 0); }

  /// Value multiplied by 2^exponent; throws unless the result is integral.
  std::int64_t scaled_integer(unsigned exponent) const {
    if (exponent < log2_den_) throw std::domain_error("dyadic value is not integral at this scale");
    if (exponent - log2_den_ >= 63) throw ArithmeticOverflow("dyadic scale too large");
    return detail::narrow(static_cast<__int128>(numerator_) << (exponent - log2_den_));
  }

  Rational to_rational() const {
    if (log2_den_ >= 63) throw ArithmeticOverflow("dyadic denominator too large");
    return Rational(numerator_, std::int64_t{1} << log2_den_);
  }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    unsigned e = std::max(a.log2_den_, b.log2_den_);
    __int128 n = (static_cast<__int128>(a.numerator_) << (e - a.log2_den_)) +
                 (static_cast<__int128>(b.numerator_) << (e - b.log2_den_));
    return DyadicRational(detail::narrow(n), e);
  }
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
    return a + (-b);
  }
  friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
    return DyadicRational(detail::narrow(static_cast<__int128>(a.numerator_) * b.numerator_),
                          a.log2_den_ + b.log2_den_);
  }
  DyadicRational operator-() const { return DyadicRational(-numerator_, log2_den_); }
  DyadicRational& operator+=(const DyadicRational& o) { return *this = *this + o; }
  DyadicRational& operator*=(const DyadicRational& o) { return *this = *this * o; }

  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    return a.to_rational() <=> b.to_rational();
  }

  friend std::ostream& operator<<(std::ostream& os, const DyadicRational& r) {
    return os << r.to_rational();
  }

 private:
  void normalize() {
    if (numerator_ == 0) {
      log2_den_ = 0;
      return;
    }
    while (log2_den_ > 0 && (numerator_ & 1) == 0) {
      numerator_ /= 2;
      --log2_den_;
    }
  }

  std::int64_t numerator_ = 0;
  unsigned log2_den_ = 0;
};

}  // namespace aboveavg
