#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tfub {

/// Exact fraction over int64 with a positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    return (num_ % den_ != 0 && num_ > 0) ? q + 1 : q;
  }
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    return (num_ % den_ != 0 && num_ < 0) ? q - 1 : q;
  }

  std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

  friend Rational operator+(Rational a, Rational b) { return from128(I(a.num_) * b.den_ + I(b.num_) * a.den_, I(a.den_) * b.den_); }
  friend Rational operator-(Rational a, Rational b) { return from128(I(a.num_) * b.den_ - I(b.num_) * a.den_, I(a.den_) * b.den_); }
  friend Rational operator*(Rational a, Rational b) { return from128(I(a.num_) * b.num_, I(a.den_) * b.den_); }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw std::domain_error("division by zero");
    return from128(I(a.num_) * b.den_, I(a.den_) * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return I(a.num_) * b.den_ <=> I(b.num_) * a.den_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  using I = __int128;

  static Rational from128(I n, I d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    I a = n < 0 ? -n : n, b = d;
    while (b) {
      I t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace tfub
