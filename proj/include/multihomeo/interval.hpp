#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "multihomeo/dyadic.hpp"

namespace multihomeo {

/// Open interval with exact dyadic endpoints; either side may be infinite
/// (nullopt = -inf on the left, +inf on the right).
class Interval {
 public:
  Interval() = default;

  static Interval bounded(Dyadic lo, Dyadic hi) {
    if (!(lo < hi)) throw std::invalid_argument("Interval: requires lo < hi");
    Interval iv;
    iv.lo_ = std::move(lo);
    iv.hi_ = std::move(hi);
    return iv;
  }

  static Interval bounded(double lo, double hi) {
    return bounded(Dyadic::from_double(lo), Dyadic::from_double(hi));
  }

  static Interval whole_line() { return Interval(); }

  static Interval left_ray(Dyadic hi) {  // (-inf, hi)
    Interval iv;
    iv.hi_ = std::move(hi);
    return iv;
  }

  static Interval right_ray(Dyadic lo) {  // (lo, +inf)
    Interval iv;
    iv.lo_ = std::move(lo);
    return iv;
  }

  bool is_bounded() const { return lo_.has_value() && hi_.has_value(); }
  bool has_lo() const { return lo_.has_value(); }
  bool has_hi() const { return hi_.has_value(); }

  const Dyadic& lo() const {
    if (!lo_) throw std::domain_error("Interval: lo is -inf");
    return *lo_;
  }
  const Dyadic& hi() const {
    if (!hi_) throw std::domain_error("Interval: hi is +inf");
    return *hi_;
  }

  double lo_double() const { return lo_ ? lo_->to_double() : -std::numeric_limits<double>::infinity(); }
  double hi_double() const { return hi_ ? hi_->to_double() : std::numeric_limits<double>::infinity(); }

  Dyadic length() const {
    if (!is_bounded()) throw std::domain_error("Interval: length of unbounded interval");
    return *hi_ - *lo_;
  }

  Dyadic midpoint() const {
    if (!is_bounded()) throw std::domain_error("Interval: midpoint of unbounded interval");
    return Dyadic::midpoint(*lo_, *hi_);
  }

  bool contains(const Dyadic& x) const {
    if (lo_ && !(*lo_ < x)) return false;
    if (hi_ && !(x < *hi_)) return false;
    return true;
  }

  bool contains(double x) const { return contains(Dyadic::from_double(x)); }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.lo_.has_value() != b.lo_.has_value() || a.hi_.has_value() != b.hi_.has_value()) return false;
    if (a.lo_ && *a.lo_ != *b.lo_) return false;
    if (a.hi_ && *a.hi_ != *b.hi_) return false;
    return true;
  }

  std::string to_string() const {
    std::string s = "(";
    s += lo_ ? lo_->to_string() : "-inf";
    s += ", ";
    s += hi_ ? hi_->to_string() : "+inf";
    s += ")";
    return s;
  }

 private:
  std::optional<Dyadic> lo_;
  std::optional<Dyadic> hi_;
};

}  // namespace multihomeo
