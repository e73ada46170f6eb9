#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "multihomeo/grid_signal.hpp"

namespace multihomeo {

/// Axis-aligned rectangle of integer frequencies, half-open per axis.
struct FreqRect {
  std::vector<std::int64_t> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(std::span<const std::int64_t> f) const {
    for (std::size_t ax = 0; ax < lo.size(); ++ax)
      if (f[ax] < lo[ax] || f[ax] >= hi[ax]) return false;
    return true;
  }

  std::int64_t cells() const {
    std::int64_t c = 1;
    for (std::size_t ax = 0; ax < lo.size(); ++ax) c *= std::max<std::int64_t>(0, hi[ax] - lo[ax]);
    return c;
  }

  static FreqRect line(std::int64_t lo, std::int64_t hi) { return FreqRect{{lo}, {hi}}; }
};

/// Disjoint rectangles covering the full frequency band [-n/2, n/2)^d.
struct FrequencyPartition {
  int dim = 1;
  int n = 0;
  std::vector<FreqRect> cells;

  std::int64_t band_lo() const { return -static_cast<std::int64_t>(n) / 2; }
  std::int64_t band_hi() const { return static_cast<std::int64_t>(n) / 2; }

  /// disjointness + full coverage, checked by exact counting over the band
  void validate() const {
    std::size_t total = 1;
    for (int ax = 0; ax < dim; ++ax) total *= static_cast<std::size_t>(n);
    std::vector<std::uint8_t> hit(total, 0);
    std::vector<std::int64_t> f(static_cast<std::size_t>(dim));
    for (const auto& r : cells) {
      if (r.dim() != dim) throw std::invalid_argument("FrequencyPartition: rectangle dim mismatch");
      // iterate the rectangle clipped to the band
      std::vector<std::int64_t> cur(r.lo.begin(), r.lo.end());
      if (r.cells() == 0) continue;
      while (true) {
        bool in_band = true;
        for (int ax = 0; ax < dim; ++ax)
          if (cur[static_cast<std::size_t>(ax)] < band_lo() || cur[static_cast<std::size_t>(ax)] >= band_hi())
            in_band = false;
        if (!in_band) throw std::invalid_argument("FrequencyPartition: rectangle outside band");
        std::size_t flat = 0;
        for (int ax = 0; ax < dim; ++ax) {
          std::int64_t st = cur[static_cast<std::size_t>(ax)] >= 0
                                ? cur[static_cast<std::size_t>(ax)]
                                : cur[static_cast<std::size_t>(ax)] + n;
          flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(st);
        }
        if (hit[flat]) throw std::invalid_argument("FrequencyPartition: overlapping rectangles");
        hit[flat] = 1;
        int ax = dim - 1;
        while (ax >= 0) {
          if (++cur[static_cast<std::size_t>(ax)] < r.hi[static_cast<std::size_t>(ax)]) break;
          cur[static_cast<std::size_t>(ax)] = r.lo[static_cast<std::size_t>(ax)];
          --ax;
        }
        if (ax < 0) break;
      }
    }
    for (auto h : hit)
      if (!h) throw std::invalid_argument("FrequencyPartition: uncovered frequencies");
  }

  std::int64_t total_cells() const {
    std::int64_t c = 0;
    for (const auto& r : cells) c += r.cells();
    return c;
  }
};

/// Whole band as a single cell.
inline FrequencyPartition full_band_partition(int dim, int n) {
  FrequencyPartition p;
  p.dim = dim;
  p.n = n;
  FreqRect r;
  r.lo.assign(static_cast<std::size_t>(dim), -static_cast<std::int64_t>(n) / 2);
  r.hi.assign(static_cast<std::size_t>(dim), static_cast<std::int64_t>(n) / 2);
  p.cells.push_back(std::move(r));
  return p;
}

/// Dyadic partition of the line restricted to the band: continuum intervals
/// (2^{k-1}, 2^k), (-1,1), (-2^{-k}, -2^{-k-1}) floored to integer cells and
/// clipped.  Covers every frequency exactly once.
inline FrequencyPartition dyadic_frequency_partition(int n) {
  FrequencyPartition p;
  p.dim = 1;
  p.n = n;
  std::int64_t lo = -static_cast<std::int64_t>(n) / 2, hi = static_cast<std::int64_t>(n) / 2;
  // center cell [-1, 1)
  p.cells.push_back(FreqRect::line(std::max<std::int64_t>(-1, lo), std::min<std::int64_t>(1, hi)));
  for (std::int64_t edge = 1; edge < hi; edge *= 2) {
    std::int64_t a = edge, b = std::min(edge * 2, hi);
    if (a < b) p.cells.push_back(FreqRect::line(a, b));
  }
  for (std::int64_t edge = 1; edge < -lo; edge *= 2) {
    std::int64_t a = std::max(-edge * 2, lo), b = -edge;
    if (a < b) p.cells.push_back(FreqRect::line(a, b));
  }
  return p;
}

/// Rectangles generated by a family of intervals: all d-fold products.
inline FrequencyPartition product_partition(const FrequencyPartition& line, int dim) {
  if (line.dim != 1) throw std::invalid_argument("product_partition: need a 1-d partition");
  FrequencyPartition p;
  p.dim = dim;
  p.n = line.n;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    FreqRect r;
    for (int ax = 0; ax < dim; ++ax) {
      const FreqRect& f = line.cells[idx[static_cast<std::size_t>(ax)]];
      r.lo.push_back(f.lo[0]);
      r.hi.push_back(f.hi[0]);
    }
    p.cells.push_back(std::move(r));
    int ax = dim - 1;
    while (ax >= 0) {
      if (++idx[static_cast<std::size_t>(ax)] < line.cells.size()) break;
      idx[static_cast<std::size_t>(ax)] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return p;
}

namespace detail {

/// Dyadic refinement of one integer interval [a, b): the continuum rule's
/// boundary points floored to integers; empty cells dropped; unresolvable
/// geometric tails merge into the end cells.
inline std::vector<FreqRect> refine_cell_dyadic(std::int64_t a, std::int64_t b) {
  if (b - a < 2) return {FreqRect::line(a, b)};  // too short to split
  double lo = static_cast<double>(a);
  double len = static_cast<double>(b - a);
  // ascending boundary ladder of the continuum rule; floors dedup to cells,
  // which drops emptied intervals and merges unresolvable geometric tails
  std::vector<double> bounds;
  for (std::int64_t k = -62; k <= -1; ++k)
    bounds.push_back(lo + len * std::ldexp(1.0, static_cast<int>(k) - 2));
  bounds.push_back(lo + len * 0.25);
  bounds.push_back(lo + len * 0.75);
  for (std::int64_t k = 1; k <= 62; ++k)
    bounds.push_back(lo + len * (1.0 - std::ldexp(1.0, -static_cast<int>(k) - 2)));
  std::vector<FreqRect> out;
  std::int64_t prev = a;
  for (double v : bounds) {
    auto cur = std::min(static_cast<std::int64_t>(std::floor(v)), b);
    if (cur > prev) {
      out.push_back(FreqRect::line(prev, cur));
      prev = cur;
    }
  }
  if (prev < b) out.push_back(FreqRect::line(prev, b));
  return out;
}

}  // namespace detail

/// Dyadic refinement of every interval of a 1-d partition.
inline FrequencyPartition refine_partition_dyadic(const FrequencyPartition& part) {
  if (part.dim != 1) throw std::invalid_argument("refine_partition_dyadic: 1-d partitions only");
  FrequencyPartition out;
  out.dim = 1;
  out.n = part.n;
  for (const auto& cell : part.cells) {
    auto kids = detail::refine_cell_dyadic(cell.lo[0], cell.hi[0]);
    out.cells.insert(out.cells.end(), kids.begin(), kids.end());
  }
  return out;
}

}  // namespace multihomeo
