#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace multihomeo {

/// Exact dyadic rational m * 2^e with arbitrary-precision mantissa.
///
/// Canonical form: mantissa is odd (or the value is zero), stored as
/// little-endian 64-bit limbs without leading zero limbs.  Every finite
/// double converts losslessly, so all interval endpoints produced by the
/// dyadic partition rules are held and compared without rounding.
class Dyadic {
 public:
  Dyadic() = default;

  static Dyadic from_int(std::int64_t v) {
    Dyadic d;
    if (v == 0) return d;
    d.sign_ = v < 0 ? -1 : 1;
    std::uint64_t mag = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
    d.mag_.push_back(mag);
    d.normalize();
    return d;
  }

  /// 2^e
  static Dyadic pow2(std::int64_t e) {
    Dyadic d;
    d.sign_ = 1;
    d.mag_.push_back(1);
    d.exp_ = e;
    return d;
  }

  static Dyadic from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("Dyadic: non-finite double");
    Dyadic d;
    if (x == 0.0) return d;
    int e2 = 0;
    double m = std::frexp(x, &e2);  // |m| in [1/2, 1)
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    d = from_int(mant);
    d.exp_ += e2 - 53;
    return d;
  }

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }
  bool negative() const { return sign_ < 0; }

  /// Mantissa equal to 1, i.e. value is +/- 2^e.
  bool is_pow2() const { return sign_ != 0 && mag_.size() == 1 && mag_[0] == 1; }

  /// floor(log2(|x|)); requires x != 0.
  std::int64_t floor_log2() const {
    if (sign_ == 0) throw std::domain_error("Dyadic: floor_log2 of zero");
    return static_cast<std::int64_t>(bit_length()) - 1 + exp_;
  }

  std::int64_t exponent() const { return exp_; }

  Dyadic operator-() const {
    Dyadic d = *this;
    d.sign_ = -d.sign_;
    return d;
  }

  Dyadic abs() const {
    Dyadic d = *this;
    if (d.sign_ < 0) d.sign_ = 1;
    return d;
  }

  /// x * 2^k
  Dyadic ldexp(std::int64_t k) const {
    Dyadic d = *this;
    if (d.sign_ != 0) d.exp_ += k;
    return d;
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    std::int64_t e = std::min(a.exp_, b.exp_);
    std::vector<std::uint64_t> ma = shifted_mag(a, a.exp_ - e);
    std::vector<std::uint64_t> mb = shifted_mag(b, b.exp_ - e);
    Dyadic r;
    r.exp_ = e;
    if (a.sign_ == b.sign_) {
      r.sign_ = a.sign_;
      r.mag_ = add_mag(ma, mb);
    } else {
      int c = cmp_mag(ma, mb);
      if (c == 0) return Dyadic();
      if (c > 0) {
        r.sign_ = a.sign_;
        r.mag_ = sub_mag(ma, mb);
      } else {
        r.sign_ = b.sign_;
        r.mag_ = sub_mag(mb, ma);
      }
    }
    r.normalize();
    return r;
  }

  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return Dyadic();
    Dyadic r;
    r.sign_ = a.sign_ * b.sign_;
    r.exp_ = a.exp_ + b.exp_;
    r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
    for (std::size_t i = 0; i < a.mag_.size(); ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t j = 0; j < b.mag_.size(); ++j) {
        unsigned __int128 cur = static_cast<unsigned __int128>(a.mag_[i]) * b.mag_[j] +
                                r.mag_[i + j] + carry;
        r.mag_[i + j] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
      }
      std::size_t k = i + b.mag_.size();
      while (carry) {
        unsigned __int128 cur = static_cast<unsigned __int128>(r.mag_[k]) + carry;
        r.mag_[k] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
        ++k;
      }
    }
    r.normalize();
    return r;
  }

  /// three-way comparison: -1, 0, +1
  int compare(const Dyadic& o) const {
    if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
    if (sign_ == 0) return 0;
    std::int64_t la = floor_log2(), lb = o.floor_log2();
    if (la != lb) return (la < lb) == (sign_ > 0) ? -1 : 1;
    Dyadic d = *this - o;
    return d.sign_;
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.compare(b) == 0; }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return a.compare(b) != 0; }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return a.compare(b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return a.compare(b) <= 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return a.compare(b) > 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return a.compare(b) >= 0; }

  /// Nearest double (exact whenever the mantissa fits in 53 bits).
  /// Values beyond double range saturate to +-inf / +-0.
  double to_double() const {
    if (sign_ == 0) return 0.0;
    std::int64_t top = floor_log2();
    if (top > 1100) return sign_ < 0 ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
    if (top < -1130) return sign_ < 0 ? -0.0 : 0.0;
    double acc = 0.0;
    for (std::size_t i = mag_.size(); i-- > 0;) acc = acc * 18446744073709551616.0 + static_cast<double>(mag_[i]);
    double v;
    if (exp_ > -1000 && exp_ < 1000) {
      v = std::ldexp(acc, static_cast<int>(exp_));
    } else {
      // stage the scaling to dodge intermediate overflow/underflow
      std::int64_t e = exp_;
      v = acc;
      while (e > 500) { v = std::ldexp(v, 500); e -= 500; }
      while (e < -500) { v = std::ldexp(v, -500); e += 500; }
      v = std::ldexp(v, static_cast<int>(e));
    }
    return sign_ < 0 ? -v : v;
  }

  /// Exact midpoint (a + b) / 2.
  static Dyadic midpoint(const Dyadic& a, const Dyadic& b) { return (a + b).ldexp(-1); }

  std::size_t bit_length() const {
    if (sign_ == 0) return 0;
    std::uint64_t top = mag_.back();
    std::size_t bits = 0;
    while (top) {
      ++bits;
      top >>= 1;
    }
    return bits + 64 * (mag_.size() - 1);
  }

  std::string to_string() const {
    if (sign_ == 0) return "0";
    std::string s = sign_ < 0 ? "-" : "";
    s += "0x";
    static const char* hex = "0123456789abcdef";
    bool leading = true;
    for (std::size_t i = mag_.size(); i-- > 0;) {
      for (int nib = 15; nib >= 0; --nib) {
        unsigned digit = (mag_[i] >> (4 * nib)) & 0xF;
        if (leading && digit == 0) continue;
        leading = false;
        s += hex[digit];
      }
    }
    s += "p";
    s += std::to_string(exp_);
    return s;
  }

 private:
  int sign_ = 0;
  std::vector<std::uint64_t> mag_;
  std::int64_t exp_ = 0;

  void normalize() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) {
      sign_ = 0;
      exp_ = 0;
      return;
    }
    // make the mantissa odd
    std::size_t zero_limbs = 0;
    while (zero_limbs < mag_.size() && mag_[zero_limbs] == 0) ++zero_limbs;
    if (zero_limbs) {
      mag_.erase(mag_.begin(), mag_.begin() + static_cast<std::ptrdiff_t>(zero_limbs));
      exp_ += 64 * static_cast<std::int64_t>(zero_limbs);
    }
    unsigned shift = 0;
    std::uint64_t low = mag_[0];
    while (((low >> shift) & 1u) == 0) ++shift;
    if (shift) {
      shr_bits(mag_, shift);
      exp_ += shift;
    }
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
  }

  static std::vector<std::uint64_t> shifted_mag(const Dyadic& d, std::int64_t left_bits) {
    std::vector<std::uint64_t> m = d.mag_;
    if (left_bits > 0) shl_bits(m, static_cast<std::uint64_t>(left_bits));
    return m;
  }

  static void shl_bits(std::vector<std::uint64_t>& m, std::uint64_t bits) {
    std::size_t limb_shift = bits / 64;
    unsigned bit_shift = static_cast<unsigned>(bits % 64);
    if (bit_shift) {
      std::uint64_t carry = 0;
      for (auto& limb : m) {
        std::uint64_t next = limb >> (64 - bit_shift);
        limb = (limb << bit_shift) | carry;
        carry = next;
      }
      if (carry) m.push_back(carry);
    }
    if (limb_shift) m.insert(m.begin(), limb_shift, 0);
  }

  static void shr_bits(std::vector<std::uint64_t>& m, unsigned bits) {
    // bits < 64
    std::uint64_t carry = 0;
    for (std::size_t i = m.size(); i-- > 0;) {
      std::uint64_t next = bits ? (m[i] << (64 - bits)) : 0;
      m[i] = (m[i] >> bits) | carry;
      carry = next;
    }
  }

  static int cmp_mag(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t la = a.size(), lb = b.size();
    while (la && a[la - 1] == 0) --la;
    while (lb && b[lb - 1] == 0) --lb;
    if (la != lb) return la < lb ? -1 : 1;
    for (std::size_t i = la; i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }

  static std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> r(std::max(a.size(), b.size()) + 1, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      unsigned __int128 cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r[i] = static_cast<std::uint64_t>(cur);
      carry = cur >> 64;
    }
    return r;
  }

  // requires a >= b
  static std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> r(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      unsigned __int128 ai = a[i];
      unsigned __int128 sub = (i < b.size() ? b[i] : 0) + static_cast<unsigned __int128>(borrow);
      if (ai >= sub) {
        r[i] = static_cast<std::uint64_t>(ai - sub);
        borrow = 0;
      } else {
        r[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) + ai - sub);
        borrow = 1;
      }
    }
    return r;
  }
};

}  // namespace multihomeo
