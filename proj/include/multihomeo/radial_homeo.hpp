#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "multihomeo/modulus.hpp"
#include "multihomeo/rng.hpp"

namespace multihomeo {

/// Radial self-map of R^d: psi(x) = g(|x|) * x/|x|, psi(0) = 0, where g is
/// piecewise linear with g(r_j) = j and slope a_{j+1} = b_{j+1}/(j+3) on
/// [r_j, r_{j+1}], r_j = sum_{s<=j} 1/a_s.  The map contracts the shell
/// { r_j <= |x| <= r_{j+1} } onto { j <= |x| <= j+1 } with Lipschitz
/// constant at most b_j.
class RadialHomeo {
 public:
  /// Build directly from a decreasing sequence b_0..b_J in (0,1).
  static RadialHomeo from_b(std::vector<double> b) {
    if (b.size() < 2) throw std::invalid_argument("RadialHomeo: need at least b_0, b_1");
    double prev = 1.0;
    for (double v : b) {
      if (!(v > 0 && v < 1)) throw std::invalid_argument("RadialHomeo: b_j must be in (0,1)");
      if (!(v < prev)) throw std::invalid_argument("RadialHomeo: b_j must decrease strictly");
      prev = v;
    }
    RadialHomeo h;
    h.b_ = std::move(b);
    h.a_.assign(h.b_.size(), 0.0);
    for (std::size_t j = 1; j < h.b_.size(); ++j)
      h.a_[j] = h.b_[j] / static_cast<double>(j + 2);
    h.r_.assign(h.b_.size(), 0.0);
    for (std::size_t j = 1; j < h.b_.size(); ++j) h.r_[j] = h.r_[j - 1] + 1.0 / h.a_[j];
    return h;
  }

  /// Build from shell moduli via the b-sequence selection.
  static RadialHomeo build(const std::function<Modulus(int)>& shell_omega, int shells) {
    return from_b(select_b(shell_omega, shells + 1));
  }

  const std::vector<double>& b() const { return b_; }

  double a(int j) const {
    if (j < 1 || static_cast<std::size_t>(j) >= a_.size())
      throw std::out_of_range("RadialHomeo: a_j index");
    return a_[static_cast<std::size_t>(j)];
  }

  double r(int j) const {
    if (j < 0 || static_cast<std::size_t>(j) >= r_.size())
      throw std::out_of_range("RadialHomeo: r_j index");
    return r_[static_cast<std::size_t>(j)];
  }

  /// Number of fully determined shells (segments of g).
  int shells() const { return static_cast<int>(b_.size()) - 1; }

  /// Piecewise-linear profile; beyond the last breakpoint the final slope
  /// continues.
  double g(double t) const {
    if (t < 0) throw std::invalid_argument("RadialHomeo: g on [0, inf)");
    std::size_t j = segment_of(t);
    return static_cast<double>(j) + a_[j + 1] * (t - r_[j]);
  }

  double g_inverse(double u) const {
    if (u < 0) throw std::invalid_argument("RadialHomeo: g_inverse on [0, inf)");
    auto j = static_cast<std::size_t>(std::min<double>(std::floor(u), static_cast<double>(shells() - 1)));
    return r_[j] + (u - static_cast<double>(j)) / a_[j + 1];
  }

  void eval(std::span<const double> x, std::span<double> out) const {
    double norm2 = 0;
    for (double xi : x) norm2 += xi * xi;
    double norm = std::sqrt(norm2);
    if (norm == 0) {
      for (auto& o : out) o = 0;
      return;
    }
    double scale = g(norm) / norm;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
  }

  std::vector<double> eval(std::span<const double> x) const {
    std::vector<double> out(x.size());
    eval(x, std::span<double>(out));
    return out;
  }

  double eval1(double x) const {
    double v[1] = {x}, o[1];
    eval(std::span<const double>(v, 1), std::span<double>(o, 1));
    return o[0];
  }

 private:
  std::vector<double> b_;  // b_0 .. b_J
  std::vector<double> a_;  // a_1 .. a_J (index 0 unused)
  std::vector<double> r_;  // r_0 .. r_J

  std::size_t segment_of(double t) const {
    // r_ is strictly increasing; find j with r_j <= t < r_{j+1}
    std::size_t lo = 0, hi = r_.size() - 1;
    if (t >= r_[hi]) return hi - 1;  // extend final slope
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      (r_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }
};

/// Max of |psi(x)-psi(y)|/|x-y| over seeded random pairs inside the shell
/// { r_j <= |x| <= r_{j+1} }.
inline double radial_lipschitz_max_ratio(const RadialHomeo& psi, int j, int dim, int pairs,
                                         std::uint64_t seed) {
  if (j < 0 || j >= psi.shells()) throw std::out_of_range("radial_lipschitz_max_ratio: shell");
  if (dim < 1) throw std::invalid_argument("radial_lipschitz_max_ratio: dim");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
  double r0 = psi.r(j), r1 = psi.r(j + 1);
  std::vector<double> x(static_cast<std::size_t>(dim)), y(x.size()), px(x.size()), py(x.size());
  auto sample = [&](std::vector<double>& v) {
    double norm2 = 0;
    for (auto& vi : v) {
      vi = rng.gaussian();
      norm2 += vi * vi;
    }
    double norm = std::sqrt(norm2);
    if (norm == 0) norm = 1;
    double radius = rng.uniform(r0, r1);
    for (auto& vi : v) vi *= radius / norm;
  };
  double worst = 0;
  for (int i = 0; i < pairs; ++i) {
    sample(x);
    sample(y);
    double d2 = 0;
    for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
    if (d2 == 0) continue;
    psi.eval(std::span<const double>(x), std::span<double>(px));
    psi.eval(std::span<const double>(y), std::span<double>(py));
    double n2 = 0;
    for (std::size_t k = 0; k < x.size(); ++k) n2 += (px[k] - py[k]) * (px[k] - py[k]);
    worst = std::max(worst, std::sqrt(n2 / d2));
  }
  return worst;
}

/// Upper bound 2 * sup_j omega_j(b_j * delta) for the modulus of f o psi,
/// 0 < delta <= 1.  The supremum is over the shells the map determines.
inline double composed_modulus_bound(const RadialHomeo& psi,
                                     const std::function<Modulus(int)>& shell_omega,
                                     double delta) {
  double sup = 0;
  for (int j = 0; j < psi.shells(); ++j) sup = std::max(sup, shell_omega(j)(psi.b()[static_cast<std::size_t>(j)] * delta));
  return 2.0 * sup;
}

}  // namespace multihomeo
