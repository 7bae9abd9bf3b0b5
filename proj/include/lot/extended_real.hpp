#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace lot {

// Extended real line {-inf} u R u {+inf} with the sign conventions the cost
// calculus needs: u(-inf) := -inf, and sums involving NEG_INF are NEG_INF even
// against POS_INF (NEG_INF absorbs; it encodes "forbidden / not causally
// related" and must never be cancelled by an unbounded gain).
class ExtendedReal {
public:
  constexpr ExtendedReal() : v_(0.0) {}
  constexpr explicit ExtendedReal(double v) : v_(v) {}

  static constexpr ExtendedReal neg_inf() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }
  static constexpr ExtendedReal pos_inf() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static constexpr ExtendedReal finite(double v) { return ExtendedReal(v); }

  constexpr bool is_neg_inf() const {
    return v_ == -std::numeric_limits<double>::infinity();
  }
  constexpr bool is_pos_inf() const {
    return v_ == std::numeric_limits<double>::infinity();
  }
  constexpr bool is_finite() const { return !is_neg_inf() && !is_pos_inf(); }

  // Raw payload; finite() callers should check is_finite() first.
  constexpr double raw() const { return v_; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
    if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
    return ExtendedReal(a.v_ + b.v_);
  }
  friend constexpr ExtendedReal operator-(ExtendedReal a) {
    if (a.is_neg_inf()) return pos_inf();
    if (a.is_pos_inf()) return neg_inf();
    return ExtendedReal(-a.v_);
  }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    return a.v_ == b.v_;
  }
  friend constexpr bool operator<(ExtendedReal a, ExtendedReal b) {
    return a.v_ < b.v_;
  }
  friend constexpr bool operator<=(ExtendedReal a, ExtendedReal b) {
    return a.v_ <= b.v_;
  }
  friend constexpr bool operator>(ExtendedReal a, ExtendedReal b) {
    return a.v_ > b.v_;
  }
  friend constexpr bool operator>=(ExtendedReal a, ExtendedReal b) {
    return a.v_ >= b.v_;
  }

  std::string str() const {
    if (is_neg_inf()) return "-inf";
    if (is_pos_inf()) return "+inf";
    return std::to_string(v_);
  }

private:
  double v_;
};

}  // namespace lot
