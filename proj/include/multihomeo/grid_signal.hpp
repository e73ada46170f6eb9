#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "multihomeo/fft.hpp"

namespace multihomeo {

/// Uniform grid of the torus [0, 2pi)^d or of a truncated box [lo, hi)^d,
/// n points per axis (a power of two).
struct GridDomain {
  enum class Kind { torus, box };
  Kind kind = Kind::torus;
  int dim = 1;
  int n = 0;
  double box_lo = 0, box_hi = 0;

  static GridDomain torus(int dim, int n) {
    GridDomain d;
    d.kind = Kind::torus;
    d.dim = dim;
    d.n = n;
    d.validate();
    return d;
  }

  static GridDomain box(int dim, int n, double lo, double hi) {
    GridDomain d;
    d.kind = Kind::box;
    d.dim = dim;
    d.n = n;
    d.box_lo = lo;
    d.box_hi = hi;
    d.validate();
    return d;
  }

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridDomain: dim must be 1..3");
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("GridDomain: n must be a power of two");
    if (kind == Kind::box && !(box_lo < box_hi)) throw std::invalid_argument("GridDomain: empty box");
  }

  double axis_lo() const { return kind == Kind::torus ? 0.0 : box_lo; }
  double axis_len() const { return kind == Kind::torus ? 2.0 * std::numbers::pi : box_hi - box_lo; }
  double spacing() const { return axis_len() / static_cast<double>(n); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int ax = 0; ax < dim; ++ax) s *= static_cast<std::size_t>(n);
    return s;
  }

  double coord(std::int64_t i) const {
    return axis_lo() + axis_len() * (static_cast<double>(i) / static_cast<double>(n));
  }

  /// Row-major flat index -> per-axis indices.
  void unflatten(std::size_t flat, std::span<std::int64_t> idx) const {
    for (int ax = dim - 1; ax >= 0; --ax) {
      idx[static_cast<std::size_t>(ax)] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(n));
      flat /= static_cast<std::size_t>(n);
    }
  }

  std::size_t flatten(std::span<const std::int64_t> idx) const {
    std::size_t f = 0;
    for (int ax = 0; ax < dim; ++ax)
      f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(ax)]);
    return f;
  }

  void point(std::size_t flat, std::span<double> out) const {
    for (int ax = dim - 1; ax >= 0; --ax) {
      out[static_cast<std::size_t>(ax)] = coord(static_cast<std::int64_t>(flat % static_cast<std::size_t>(n)));
      flat /= static_cast<std::size_t>(n);
    }
  }

  friend bool operator==(const GridDomain& a, const GridDomain& b) {
    if (a.kind != b.kind || a.dim != b.dim || a.n != b.n) return false;
    return a.kind == Kind::torus || (a.box_lo == b.box_lo && a.box_hi == b.box_hi);
  }
};

/// Complex samples on a uniform grid.  Norms use the normalized counting
/// measure, so constants have unit norm at every p.
class GridSignal {
 public:
  GridSignal() = default;
  explicit GridSignal(GridDomain dom)
      : dom_(dom), v_(dom.size(), std::complex<double>(0.0, 0.0)) {}
  GridSignal(GridDomain dom, std::vector<std::complex<double>> values)
      : dom_(dom), v_(std::move(values)) {
    if (v_.size() != dom_.size()) throw std::invalid_argument("GridSignal: value count mismatch");
  }

  static GridSignal from_function(const GridDomain& dom,
                                  const std::function<std::complex<double>(std::span<const double>)>& f) {
    GridSignal g(dom);
    std::vector<double> pt(static_cast<std::size_t>(dom.dim));
    for (std::size_t i = 0; i < g.v_.size(); ++i) {
      dom.point(i, std::span<double>(pt));
      g.v_[i] = f(std::span<const double>(pt));
    }
    return g;
  }

  const GridDomain& domain() const { return dom_; }
  std::span<const std::complex<double>> values() const { return v_; }
  std::span<std::complex<double>> values() { return v_; }
  std::size_t size() const { return v_.size(); }

  std::complex<double> operator[](std::size_t i) const { return v_[i]; }
  std::complex<double>& operator[](std::size_t i) { return v_[i]; }

  double sup_norm() const {
    double m = 0;
    for (const auto& z : v_) m = std::max(m, std::abs(z));
    return m;
  }

  double lp_norm(double p) const {
    if (p <= 0) throw std::invalid_argument("GridSignal: p must be positive");
    if (std::isinf(p)) return sup_norm();
    double acc = 0;
    for (const auto& z : v_) acc += std::pow(std::abs(z), p);
    return std::pow(acc / static_cast<double>(v_.size()), 1.0 / p);
  }

  double l2_norm() const {
    double acc = 0;
    for (const auto& z : v_) acc += std::norm(z);
    return std::sqrt(acc / static_cast<double>(v_.size()));
  }

 private:
  GridDomain dom_;
  std::vector<std::complex<double>> v_;
};

/// Discrete Fourier coefficients indexed by integer frequencies in
/// [-n/2, n/2)^d, stored in FFT-natural order.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int dim, int n) : dim_(dim), n_(n), c_(total(dim, n), std::complex<double>(0, 0)) {}
  Spectrum(int dim, int n, std::vector<std::complex<double>> coeffs)
      : dim_(dim), n_(n), c_(std::move(coeffs)) {
    if (c_.size() != total(dim, n)) throw std::invalid_argument("Spectrum: size mismatch");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::span<const std::complex<double>> coeffs() const { return c_; }
  std::span<std::complex<double>> coeffs() { return c_; }
  std::size_t size() const { return c_.size(); }

  std::int64_t freq_lo() const { return -static_cast<std::int64_t>(n_) / 2; }
  std::int64_t freq_hi() const { return static_cast<std::int64_t>(n_) / 2; }  // exclusive

  /// signed frequency of a storage index along one axis
  std::int64_t freq_of(std::int64_t storage) const {
    return storage < n_ / 2 ? storage : storage - n_;
  }

  std::int64_t storage_of(std::int64_t freq) const {
    if (freq < freq_lo() || freq >= freq_hi()) throw std::out_of_range("Spectrum: frequency outside band");
    return freq >= 0 ? freq : freq + n_;
  }

  std::complex<double>& at(std::span<const std::int64_t> freq) {
    return c_[flat_of(freq)];
  }
  std::complex<double> at(std::span<const std::int64_t> freq) const { return c_[flat_of(freq)]; }

  std::complex<double>& at1(std::int64_t f) {
    std::int64_t v[1] = {f};
    return at(std::span<const std::int64_t>(v, 1));
  }

  /// flat storage index -> signed frequency vector
  void freqs_of_flat(std::size_t flat, std::span<std::int64_t> out) const {
    for (int ax = dim_ - 1; ax >= 0; --ax) {
      out[static_cast<std::size_t>(ax)] = freq_of(static_cast<std::int64_t>(flat % static_cast<std::size_t>(n_)));
      flat /= static_cast<std::size_t>(n_);
    }
  }

 private:
  int dim_ = 1, n_ = 0;
  std::vector<std::complex<double>> c_;

  static std::size_t total(int dim, int n) {
    std::size_t s = 1;
    for (int ax = 0; ax < dim; ++ax) s *= static_cast<std::size_t>(n);
    return s;
  }

  std::size_t flat_of(std::span<const std::int64_t> freq) const {
    if (freq.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("Spectrum: dim mismatch");
    std::size_t f = 0;
    for (int ax = 0; ax < dim_; ++ax)
      f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(storage_of(freq[static_cast<std::size_t>(ax)]));
    return f;
  }
};

/// Analysis: c_k = (1/N^d) sum_j f_j e^{-i<k, t_j>}; synthesis inverts it
/// exactly up to roundoff.
inline Spectrum analyze(const GridSignal& f) {
  const auto& dom = f.domain();
  std::vector<std::complex<double>> data(f.values().begin(), f.values().end());
  fft_nd(data, dom.dim, static_cast<std::size_t>(dom.n), false);
  double scale = 1.0 / static_cast<double>(f.size());
  for (auto& z : data) z *= scale;
  return Spectrum(dom.dim, dom.n, std::move(data));
}

inline GridSignal synthesize(const Spectrum& s, const GridDomain& dom) {
  if (dom.dim != s.dim() || dom.n != s.n()) throw std::invalid_argument("synthesize: domain mismatch");
  std::vector<std::complex<double>> data(s.coeffs().begin(), s.coeffs().end());
  fft_nd(data, s.dim(), static_cast<std::size_t>(s.n()), true);
  return GridSignal(dom, std::move(data));
}

}  // namespace multihomeo
