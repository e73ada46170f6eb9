#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "multihomeo/frequency_partition.hpp"
#include "multihomeo/grid_signal.hpp"

namespace multihomeo {

/// Bounded symbol on the integer frequency grid [-n/2, n/2)^d, stored in
/// FFT-natural order.  An optional piecewise-constant certificate (rectangle
/// list plus values) can be attached and verified against the samples.
class MultiplierSymbol {
 public:
  MultiplierSymbol() = default;
  MultiplierSymbol(int dim, int n) : spec_(dim, n) {}
  MultiplierSymbol(int dim, int n, std::vector<std::complex<double>> values)
      : spec_(dim, n, std::move(values)) {}

  static MultiplierSymbol from_function(
      int dim, int n, const std::function<std::complex<double>(std::span<const std::int64_t>)>& m) {
    MultiplierSymbol out(dim, n);
    std::vector<std::int64_t> freq(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < out.spec_.size(); ++i) {
      out.spec_.freqs_of_flat(i, std::span<std::int64_t>(freq));
      out.spec_.coeffs()[i] = m(std::span<const std::int64_t>(freq));
    }
    return out;
  }

  static MultiplierSymbol constant(int dim, int n, std::complex<double> c) {
    return from_function(dim, n, [c](std::span<const std::int64_t>) { return c; });
  }

  /// Indicator of a frequency rectangle.
  static MultiplierSymbol indicator(int dim, int n, const FreqRect& rect) {
    auto out = from_function(dim, n, [&rect](std::span<const std::int64_t> f) {
      return std::complex<double>(rect.contains(f) ? 1.0 : 0.0, 0.0);
    });
    out.certificate_.push_back({rect, {1.0, 0.0}});
    return out;
  }

  int dim() const { return spec_.dim(); }
  int n() const { return spec_.n(); }
  std::span<const std::complex<double>> values() const { return spec_.coeffs(); }
  std::span<std::complex<double>> values() { return spec_.coeffs(); }
  std::size_t size() const { return spec_.size(); }

  std::complex<double> at(std::span<const std::int64_t> freq) const { return spec_.at(freq); }
  std::complex<double>& at(std::span<const std::int64_t> freq) { return spec_.at(freq); }

  double sup_norm() const {
    double s = 0;
    for (const auto& z : spec_.coeffs()) s = std::max(s, std::abs(z));
    return s;
  }

  MultiplierSymbol conjugate() const {
    MultiplierSymbol out(dim(), n());
    for (std::size_t i = 0; i < size(); ++i) out.spec_.coeffs()[i] = std::conj(spec_.coeffs()[i]);
    return out;
  }

  struct CertificatePiece {
    FreqRect rect;
    std::complex<double> value;
  };

  void attach_certificate(std::vector<CertificatePiece> pieces) { certificate_ = std::move(pieces); }
  const std::vector<CertificatePiece>& certificate() const { return certificate_; }
  bool has_certificate() const { return !certificate_.empty(); }

  /// The certificate must reproduce the sampled values exactly; frequencies
  /// not covered by any certificate rectangle must hold zero.
  bool verify_certificate() const {
    if (certificate_.empty()) return false;
    std::vector<std::int64_t> freq(static_cast<std::size_t>(dim()));
    for (std::size_t i = 0; i < size(); ++i) {
      spec_.freqs_of_flat(i, std::span<std::int64_t>(freq));
      std::complex<double> expected(0.0, 0.0);
      for (const auto& piece : certificate_) {
        if (piece.rect.contains(std::span<const std::int64_t>(freq))) {
          expected = piece.value;
          break;
        }
      }
      if (spec_.coeffs()[i] != expected) return false;
    }
    return true;
  }

 private:
  Spectrum spec_;
  std::vector<CertificatePiece> certificate_;
};

/// The multiplier operator: pointwise symbol multiplication on the spectrum.
/// Linear and translation-invariant (commutes with cyclic shifts exactly).
inline GridSignal apply(const MultiplierSymbol& m, const GridSignal& f) {
  const auto& dom = f.domain();
  if (dom.dim != m.dim() || dom.n != m.n())
    throw std::invalid_argument("apply: symbol/signal grid mismatch");
  Spectrum s = analyze(f);
  for (std::size_t i = 0; i < s.size(); ++i) s.coeffs()[i] *= m.values()[i];
  return synthesize(s, dom);
}

/// Convolution kernel of the operator: the response to the unit impulse.
inline GridSignal impulse_response(const MultiplierSymbol& m, const GridDomain& dom) {
  GridSignal delta(dom);
  delta[0] = 1.0;
  return apply(m, delta);
}

}  // namespace multihomeo
