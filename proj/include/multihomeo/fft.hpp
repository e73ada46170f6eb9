#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace multihomeo {

/// In-place radix-2 complex FFT.  Length must be a power of two.
inline void fft_inplace(std::complex<double>* a, std::size_t n, bool inverse) {
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: length must be a power of two");
  if (n == 1) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // per-call twiddle table keeps the transform reentrant
  std::vector<std::complex<double>> w(n / 2);
  double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w[k * step];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

/// Separable d-dimensional transform on a row-major N^d array.
inline void fft_nd(std::vector<std::complex<double>>& data, int dim, std::size_t n, bool inverse) {
  if (dim < 1) throw std::invalid_argument("fft_nd: dim must be >= 1");
  std::size_t total = 1;
  for (int ax = 0; ax < dim; ++ax) total *= n;
  if (data.size() != total) throw std::invalid_argument("fft_nd: size mismatch");
  if (dim == 1) {
    fft_inplace(data.data(), n, inverse);
    return;
  }
  std::vector<std::complex<double>> line(n);
  // axis ax has stride n^(dim-1-ax) in row-major order
  std::size_t stride = total;
  for (int ax = 0; ax < dim; ++ax) {
    stride /= n;
    std::size_t lines = total / n;
    for (std::size_t li = 0; li < lines; ++li) {
      // decompose line index into the base offset skipping the ax axis
      std::size_t rem = li;
      std::size_t base = 0;
      std::size_t s = total;
      for (int b = 0; b < dim; ++b) {
        s /= n;
        if (b == ax) continue;
        std::size_t coord = rem % n;
        rem /= n;
        base += coord * s;
      }
      for (std::size_t k = 0; k < n; ++k) line[k] = data[base + k * stride];
      fft_inplace(line.data(), n, inverse);
      for (std::size_t k = 0; k < n; ++k) data[base + k * stride] = line[k];
    }
  }
}

}  // namespace multihomeo
