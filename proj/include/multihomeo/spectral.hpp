#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "multihomeo/frequency_partition.hpp"
#include "multihomeo/grid_signal.hpp"
#include "multihomeo/nets.hpp"
#include "multihomeo/rng.hpp"

namespace multihomeo {

/// Band projection: zero the spectrum outside the rectangle.
inline GridSignal project(const GridSignal& f, const FreqRect& rect) {
  const auto& dom = f.domain();
  if (rect.dim() != dom.dim) throw std::invalid_argument("project: dimension mismatch");
  Spectrum s = analyze(f);
  for (std::size_t ax = 0; ax < rect.lo.size(); ++ax)
    if (rect.lo[ax] < s.freq_lo() || rect.hi[ax] > s.freq_hi())
      throw std::invalid_argument("project: rectangle outside band");
  std::vector<std::int64_t> freq(static_cast<std::size_t>(dom.dim));
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.freqs_of_flat(i, std::span<std::int64_t>(freq));
    if (!rect.contains(std::span<const std::int64_t>(freq))) s.coeffs()[i] = 0;
  }
  return synthesize(s, dom);
}

/// Pointwise square function over a partition: sqrt(sum_I |S_I f|^2).
inline GridSignal square_function(const GridSignal& f, const FrequencyPartition& part) {
  const auto& dom = f.domain();
  if (part.dim != dom.dim || part.n != dom.n)
    throw std::invalid_argument("square_function: partition/grid mismatch");
  // one pass over the spectrum: route each coefficient to its cell
  Spectrum s = analyze(f);
  std::vector<int> cell_of(s.size(), -1);
  std::vector<std::int64_t> freq(static_cast<std::size_t>(dom.dim));
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.freqs_of_flat(i, std::span<std::int64_t>(freq));
    for (std::size_t c = 0; c < part.cells.size(); ++c) {
      if (part.cells[c].contains(std::span<const std::int64_t>(freq))) {
        cell_of[i] = static_cast<int>(c);
        break;
      }
    }
    if (cell_of[i] < 0) throw std::invalid_argument("square_function: frequency not covered");
  }
  std::vector<double> acc(f.size(), 0.0);
  Spectrum piece(dom.dim, dom.n);
  for (std::size_t c = 0; c < part.cells.size(); ++c) {
    bool any = false;
    for (auto& z : piece.coeffs()) z = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (cell_of[i] == static_cast<int>(c) && s.coeffs()[i] != std::complex<double>(0, 0)) {
        piece.coeffs()[i] = s.coeffs()[i];
        any = true;
      }
    }
    if (!any) continue;
    GridSignal part_signal = synthesize(piece, dom);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += std::norm(part_signal[j]);
  }
  GridSignal out(dom);
  for (std::size_t j = 0; j < acc.size(); ++j) out[j] = std::sqrt(acc[j]);
  return out;
}

struct LpConstants {
  double a_p = 0;  // min observed ratio ||S f||_p / ||f||_p
  double b_p = 0;  // max observed ratio
  int trials = 0;
};

/// Empirical square-function constants from seeded random Gaussian spectra.
inline LpConstants empirical_lp_constants(const FrequencyPartition& part, double p, int trials,
                                          std::uint64_t seed) {
  if (!(p > 1) || std::isinf(p)) throw std::invalid_argument("empirical_lp_constants: 1 < p < inf");
  GridDomain dom = GridDomain::torus(part.dim, part.n);
  LpConstants out;
  out.a_p = std::numeric_limits<double>::infinity();
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Spectrum s(dom.dim, dom.n);
    for (auto& z : s.coeffs()) z = rng.gaussian_complex();
    GridSignal f = synthesize(s, dom);
    GridSignal sq = square_function(f, part);
    double ratio = sq.lp_norm(p) / f.lp_norm(p);
    out.a_p = std::min(out.a_p, ratio);
    out.b_p = std::max(out.b_p, ratio);
  }
  return out;
}

/// Piecewise-constant approximant on rank-nu dyadic rectangles: the value on
/// each rectangle is g at the rectangle's center.  g must be evaluable at
/// exact centers, which grid samples alone cannot provide.
inline GridSignal approximant(const std::function<std::complex<double>(std::span<const double>)>& g,
                              const GridDomain& dom, const Net& net, int rank) {
  if (net.kind() != Net::Kind::alpha)
    throw std::invalid_argument("approximant: rectangles come from the dyadic net");
  if (rank < 1) throw std::invalid_argument("approximant: rank must be >= 1");
  // per-axis: map grid coordinates to cells once, then reuse across points
  std::vector<NetAddress> axis_cell(static_cast<std::size_t>(dom.n));
  std::vector<double> axis_center(static_cast<std::size_t>(dom.n));
  std::vector<std::size_t> axis_id(static_cast<std::size_t>(dom.n));
  std::map<std::vector<std::int64_t>, std::size_t> ids;
  for (int i = 0; i < dom.n; ++i) {
    Dyadic x = Dyadic::from_double(dom.coord(i));
    NetAddress addr = net.locate_cell(x, rank);
    auto [it, fresh] = ids.try_emplace(addr.path, ids.size());
    axis_id[static_cast<std::size_t>(i)] = it->second;
    axis_cell[static_cast<std::size_t>(i)] = addr;
    axis_center[static_cast<std::size_t>(i)] =
        net.interval_at(addr).midpoint().to_double();
  }
  GridSignal out(dom);
  std::map<std::vector<std::size_t>, std::complex<double>> value_cache;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(dom.dim));
  std::vector<double> center(static_cast<std::size_t>(dom.dim));
  std::vector<std::size_t> key(static_cast<std::size_t>(dom.dim));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    dom.unflatten(flat, std::span<std::int64_t>(idx));
    for (int ax = 0; ax < dom.dim; ++ax) {
      auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(ax)]);
      key[static_cast<std::size_t>(ax)] = axis_id[i];
      center[static_cast<std::size_t>(ax)] = axis_center[i];
    }
    auto [it, fresh] = value_cache.try_emplace(key, std::complex<double>(0, 0));
    if (fresh) it->second = g(std::span<const double>(center));
    out[flat] = it->second;
  }
  return out;
}

/// Oscillation of grid samples over a real rectangle: sup |f(t1) - f(t2)|
/// over grid points inside.  Real data uses max - min; complex data scans
/// pairs.
inline double oscillation(const GridSignal& f, std::span<const double> rect_lo,
                          std::span<const double> rect_hi) {
  const auto& dom = f.domain();
  if (rect_lo.size() != static_cast<std::size_t>(dom.dim) || rect_hi.size() != rect_lo.size())
    throw std::invalid_argument("oscillation: rectangle dimension mismatch");
  std::vector<std::size_t> inside;
  std::vector<double> pt(static_cast<std::size_t>(dom.dim));
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    dom.point(flat, std::span<double>(pt));
    bool in = true;
    for (std::size_t ax = 0; ax < pt.size(); ++ax)
      if (!(rect_lo[ax] < pt[ax] && pt[ax] < rect_hi[ax])) in = false;
    if (in) inside.push_back(flat);
  }
  if (inside.empty()) throw std::invalid_argument("oscillation: no grid point in rectangle");
  bool real_valued = true;
  for (std::size_t i : inside)
    if (f[i].imag() != 0.0) {
      real_valued = false;
      break;
    }
  if (real_valued) {
    double lo = f[inside[0]].real(), hi = lo;
    for (std::size_t i : inside) {
      lo = std::min(lo, f[i].real());
      hi = std::max(hi, f[i].real());
    }
    return hi - lo;
  }
  double best = 0;
  for (std::size_t i = 0; i < inside.size(); ++i)
    for (std::size_t j = i + 1; j < inside.size(); ++j)
      best = std::max(best, std::abs(f[inside[i]] - f[inside[j]]));
  return best;
}

/// Periodic extension of a symbol supported on one period cube onto the
/// discrete torus grid.  The input lives on a box grid whose axis length is
/// one period; indices fold by translation.  Nonzero samples outside the
/// declared cube are an error.
inline GridSignal periodize(const GridSignal& cube) {
  const auto& dom = cube.domain();
  if (dom.kind != GridDomain::Kind::box) throw std::invalid_argument("periodize: need a box grid");
  double period = 2.0 * std::numbers::pi;
  if (std::abs(dom.axis_len() - period) > 1e-9 * period)
    throw std::invalid_argument("periodize: support overflows one period cube");
  // translation offset in grid steps must be integral
  double steps = dom.box_lo / dom.spacing();
  double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9)
    throw std::invalid_argument("periodize: cube is not aligned with the torus grid");
  auto offset = static_cast<std::int64_t>(rounded);
  GridDomain torus = GridDomain::torus(dom.dim, dom.n);
  GridSignal out(torus);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(dom.dim));
  for (std::size_t flat = 0; flat < cube.size(); ++flat) {
    dom.unflatten(flat, std::span<std::int64_t>(idx));
    for (auto& i : idx) {
      i = (i + offset) % dom.n;
      if (i < 0) i += dom.n;
    }
    out[torus.flatten(std::span<const std::int64_t>(idx))] = cube[flat];
  }
  return out;
}

}  // namespace multihomeo
