#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multihomeo/modulus.hpp"
#include "multihomeo/multiplier.hpp"
#include "multihomeo/nets.hpp"
#include "multihomeo/rng.hpp"

namespace multihomeo {

/// Exact operator norm at p = 2: the sup of the symbol.
inline double norm_m2(const MultiplierSymbol& m) { return m.sup_norm(); }

/// Interpolation upper bound on the grid operator norm.
/// For 1 <= p <= 2: ||k||_1^{2/p-1} * (sup|m|)^{2-2/p}, where k is the
/// convolution kernel; exponents p > 2 use the dual exponent.  The kernel
/// l1 norm bounds the p = 1 operator norm exactly on the cyclic grid.
inline double upper_bound(const MultiplierSymbol& m, double p) {
  if (p < 1) throw std::invalid_argument("upper_bound: p must be >= 1");
  double pe = std::isinf(p) ? 1.0 : std::min(p, p / (p - 1.0));
  if (p == 1.0) pe = 1.0;
  GridDomain dom = GridDomain::torus(m.dim(), m.n());
  GridSignal k = impulse_response(m, dom);
  double l1 = 0;
  for (std::size_t i = 0; i < k.size(); ++i) l1 += std::abs(k[i]);
  double s = m.sup_norm();
  if (pe == 1.0) return l1;
  double theta = 2.0 - 2.0 / pe;  // 0 at p=1, 1 at p=2
  return std::pow(l1, 1.0 - theta) * std::pow(s, theta);
}

namespace detail {

/// phase(v) * |v|^{r-1}, the norming direction for the exponent r
inline void dual_vector(const GridSignal& v, double r, GridSignal& out) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    out[i] = a == 0 ? std::complex<double>(0, 0) : v[i] / a * std::pow(a, r - 1.0);
  }
}

inline void normalize_lp(GridSignal& v, double p) {
  double n = v.lp_norm(p);
  if (n == 0) return;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] /= n;
}

}  // namespace detail

struct LowerBoundResult {
  double value = 0;      // certified by a fresh application to the witness
  double p = 0;          // exponent the value bounds
  GridSignal witness;    // the certifying vector
  bool via_adjoint = false;  // witness drives the conjugate symbol at the dual exponent
  std::vector<std::vector<double>> traces;  // running max per iteration, one per restart
};

struct LowerBoundOptions {
  int iterations = 50;
  int restarts = 8;
  std::uint64_t seed = 1;
  bool dual_sweep = true;  // also iterate the conjugate symbol at the dual exponent
  std::vector<GridSignal> starts;  // optional explicit start vectors (prepended)
};

namespace detail {

struct SweepOutcome {
  double best = 0;
  GridSignal witness;
  std::vector<std::vector<double>> traces;
};

/// Nonlinear power iteration for the p -> p operator norm of the multiplier.
/// Each reported level is a genuine ratio ||Q x||_p / ||x||_p, so the running
/// max is a certified lower bound at every step.
inline SweepOutcome power_sweep(const MultiplierSymbol& m, double p,
                                const LowerBoundOptions& opt) {
  double q = p / (p - 1.0);
  GridDomain dom = GridDomain::torus(m.dim(), m.n());
  MultiplierSymbol madj = m.conjugate();
  SweepOutcome out;

  std::vector<GridSignal> starts = opt.starts;
  {
    // argmax tone start: a pure frequency achieves |m| there at every p
    std::size_t best_i = 0;
    double best_a = -1;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double a = std::abs(m.values()[i]);
      if (a > best_a) {
        best_a = a;
        best_i = i;
      }
    }
    Spectrum tone(m.dim(), m.n());
    tone.coeffs()[best_i] = 1.0;
    starts.push_back(synthesize(tone, dom));
    GridSignal delta(dom);
    delta[0] = 1.0;
    starts.push_back(std::move(delta));
  }
  auto total = static_cast<std::size_t>(opt.restarts);
  for (std::size_t r = starts.size(); r < total; ++r) {
    Rng rng(mix_seed(opt.seed, r));
    GridSignal g(dom);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.gaussian_complex();
    starts.push_back(std::move(g));
  }

  GridSignal u(dom), z(dom);
  for (std::size_t r = 0; r < starts.size(); ++r) {
    GridSignal x = starts[r];
    if (x.lp_norm(p) == 0) continue;
    detail::normalize_lp(x, p);
    double run_max = 0;
    GridSignal run_witness = x;
    std::vector<double> trace;
    for (int it = 0; it < opt.iterations; ++it) {
      GridSignal y = apply(m, x);
      double ratio = y.lp_norm(p) / x.lp_norm(p);
      if (ratio > run_max) {
        run_max = ratio;
        run_witness = x;
      }
      trace.push_back(run_max);
      if (ratio == 0) break;  // degenerate step: restart
      detail::dual_vector(y, p, u);
      z = apply(madj, u);
      if (z.lp_norm(q) == 0) break;
      detail::dual_vector(z, q, x);
      detail::normalize_lp(x, p);
    }
    if (run_max > out.best) {
      out.best = run_max;
      out.witness = run_witness;
    }
    out.traces.push_back(std::move(trace));
  }
  return out;
}

}  // namespace detail

/// Certified lower bound for the grid M_p norm of the symbol.  The reported
/// value is re-verified by one fresh application to the stored witness.  The
/// optional dual sweep runs the conjugate symbol at the dual exponent (the
/// two operator norms coincide) and keeps the better certificate.
inline LowerBoundResult lower_bound(const MultiplierSymbol& m, double p,
                                    LowerBoundOptions opt = {}) {
  if (!(p > 1) || std::isinf(p)) throw std::invalid_argument("lower_bound: 1 < p < inf");
  double q = p / (p - 1.0);
  auto direct = detail::power_sweep(m, p, opt);
  LowerBoundResult res;
  res.p = p;
  res.witness = direct.witness;
  res.via_adjoint = false;
  res.traces = std::move(direct.traces);
  double best = direct.best;
  if (opt.dual_sweep) {
    LowerBoundOptions dual_opt = opt;
    dual_opt.dual_sweep = false;
    dual_opt.starts.clear();
    auto adj = detail::power_sweep(m.conjugate(), q, dual_opt);
    if (adj.best > best) {
      best = adj.best;
      res.witness = adj.witness;
      res.via_adjoint = true;
    }
  }
  // witness recheck: never report a value the witness does not reproduce
  if (res.witness.size() == 0) {
    res.value = 0;
    return res;
  }
  const MultiplierSymbol& sym = res.via_adjoint ? m.conjugate() : m;
  double pe = res.via_adjoint ? q : p;
  GridSignal y = apply(sym, res.witness);
  res.value = y.lp_norm(pe) / res.witness.lp_norm(pe);
  return res;
}

struct NormEstimate {
  double p = 0;
  double lower = 0;
  double upper = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::string method_lower = "power-iteration+witness";
  std::string method_upper = "kernel-interpolation";
  bool witness_via_adjoint = false;
};

inline NormEstimate estimate_norm(const MultiplierSymbol& m, double p, LowerBoundOptions opt = {}) {
  NormEstimate e;
  e.p = p;
  e.n = m.n();
  e.seed = opt.seed;
  if (p == 2.0) {
    e.lower = norm_m2(m);
    e.upper = norm_m2(m);
    e.method_lower = "sup-symbol";
    e.method_upper = "sup-symbol";
    return e;
  }
  auto lb = lower_bound(m, p, opt);
  e.lower = lb.value;
  e.upper = upper_bound(m, p);
  e.witness_via_adjoint = lb.via_adjoint;
  return e;
}

/// Random +-1 symbol constant on the rank-nu cells of the dyadic net, on the
/// frequency box [-band, band) sampled at n points.
inline MultiplierSymbol piecewise_constant_symbol(int n, double band, const Net& net, int rank,
                                                  std::uint64_t seed) {
  if (net.kind() != Net::Kind::alpha)
    throw std::invalid_argument("piecewise_constant_symbol: dyadic net expected");
  MultiplierSymbol m(1, n);
  double step = 2.0 * band / static_cast<double>(n);
  std::map<std::vector<std::int64_t>, double> signs;
  std::map<std::vector<std::int64_t>, std::pair<std::int64_t, std::int64_t>> spans;
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t freq = i < n / 2 ? i : i - n;
    double xi = static_cast<double>(freq) * step;
    NetAddress cell = net.locate_cell(Dyadic::from_double(xi), rank);
    auto [it, fresh] = signs.try_emplace(cell.path, 0.0);
    if (fresh) {
      std::uint64_t h = seed;
      for (std::int64_t pslot : cell.path) h = mix_seed(h, static_cast<std::uint64_t>(pslot) + 0x80000000ull);
      it->second = (splitmix64(h) & 1) ? 1.0 : -1.0;
    }
    std::int64_t fv[1] = {freq};
    m.at(std::span<const std::int64_t>(fv, 1)) = it->second;
    auto [sit, sfresh] = spans.try_emplace(cell.path, std::make_pair(freq, freq + 1));
    if (!sfresh) {
      sit->second.first = std::min(sit->second.first, freq);
      sit->second.second = std::max(sit->second.second, freq + 1);
    }
  }
  std::vector<MultiplierSymbol::CertificatePiece> cert;
  for (const auto& [path, span] : spans)
    cert.push_back({FreqRect::line(span.first, span.second), {signs[path], 0.0}});
  m.attach_certificate(std::move(cert));
  return m;
}

/// Lower estimate of the norm constant for symbols constant on rank-nu
/// dyadic cells: max over seeded random sign patterns of the certified
/// lower bound divided by the sup norm (which is 1).
inline double estimate_c(double p, int rank, int n, double band, int trials, std::uint64_t seed,
                         LowerBoundOptions opt = {}) {
  Net alpha = Net::alpha();
  double best = 0;
  for (int t = 0; t < trials; ++t) {
    auto m = piecewise_constant_symbol(n, band, alpha, rank, mix_seed(seed, static_cast<std::uint64_t>(t)));
    LowerBoundOptions o = opt;
    o.seed = mix_seed(seed, 0x515u + static_cast<std::uint64_t>(t));
    if (p == 2.0) {
      best = std::max(best, norm_m2(m));
    } else {
      best = std::max(best, lower_bound(m, p, o).value);
    }
  }
  return best;
}

struct TelescopeBound {
  std::vector<double> terms;  // term for nu = 2 .. count+1, i.e. 2 c(p,nu) omega(delta_{nu-1} sqrt(d))
  std::vector<double> tails;  // tails[i] = sum of terms from nu = i+2 on

  double tail_from(int nu_start) const {
    // bound on ||g_{n+m} - g_n||_{M_p} for n = nu_start, any m
    double acc = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      int nu = static_cast<int>(i) + 2;
      if (nu > nu_start) acc += terms[i];
    }
    return acc;
  }
};

/// Partial sums of 2 c(p,nu) omega(delta_{nu-1} sqrt(d)).
inline TelescopeBound telescope_bound(const Modulus& omega, std::span<const double> deltas,
                                      const std::function<double(double, int)>& c_of, double p,
                                      int d) {
  if (d < 1) throw std::invalid_argument("telescope_bound: dimension");
  double sqrt_d = std::sqrt(static_cast<double>(d));
  TelescopeBound out;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    int nu = static_cast<int>(i) + 2;  // delta_{nu-1} = deltas[i]
    out.terms.push_back(2.0 * c_of(p, nu) * omega(deltas[i] * sqrt_d));
  }
  out.tails.resize(out.terms.size());
  double acc = 0;
  for (std::size_t i = out.terms.size(); i-- > 0;) {
    acc += out.terms[i];
    out.tails[i] = acc;
  }
  return out;
}

/// Affine self-maps of the cyclic frequency grid: translation, reflection,
/// and invertible (odd) dilation with index folding.
struct GridAffine {
  enum class Kind { shift, reflect, dilate };
  Kind kind = Kind::shift;
  std::int64_t param = 0;

  static GridAffine shift(std::int64_t a) { return {Kind::shift, a}; }
  static GridAffine reflect() { return {Kind::reflect, 0}; }
  static GridAffine dilate(std::int64_t c) { return {Kind::dilate, c}; }
};

inline MultiplierSymbol compose_affine(const MultiplierSymbol& m, const GridAffine& l) {
  if (m.dim() != 1) throw std::invalid_argument("compose_affine: 1-d symbols");
  auto n = static_cast<std::int64_t>(m.n());
  if (l.kind == GridAffine::Kind::dilate && ((l.param % 2) == 0))
    throw std::invalid_argument("compose_affine: dilation must be invertible mod n (odd factor)");
  return MultiplierSymbol::from_function(1, m.n(), [&](std::span<const std::int64_t> f) {
    std::int64_t v = f[0];
    switch (l.kind) {
      case GridAffine::Kind::shift:
        v = f[0] + l.param;
        break;
      case GridAffine::Kind::reflect:
        v = -f[0];
        break;
      case GridAffine::Kind::dilate:
        v = f[0] * l.param;
        break;
    }
    v %= n;
    if (v < -n / 2) v += n;
    if (v >= n / 2) v -= n;
    std::int64_t fv[1] = {v};
    return m.at(std::span<const std::int64_t>(fv, 1));
  });
}

namespace detail {

inline std::int64_t mod_inverse_pow2(std::int64_t c, std::int64_t n) {
  // n is a power of two, c odd: Newton iteration doubles correct bits
  std::uint64_t x = 1;
  auto uc = static_cast<std::uint64_t>(((c % n) + n) % n);
  for (int it = 0; it < 7; ++it) x = x * (2 - uc * x);
  return static_cast<std::int64_t>(x & (static_cast<std::uint64_t>(n) - 1));
}

/// The time-side isometry conjugating the composed operator back to the
/// original: starts mapped through it make the two power iterations agree
/// to roundoff, isolating the symmetry defect from estimator variance.
inline GridSignal conjugate_start(const GridSignal& x, const GridAffine& l) {
  const GridDomain& dom = x.domain();
  GridSignal out(dom);
  auto n = static_cast<std::int64_t>(dom.n);
  switch (l.kind) {
    case GridAffine::Kind::shift: {
      for (std::int64_t j = 0; j < n; ++j) {
        double t = dom.coord(j);
        out[static_cast<std::size_t>(j)] =
            x[static_cast<std::size_t>(j)] *
            std::exp(std::complex<double>(0, -static_cast<double>(l.param) * t));
      }
      break;
    }
    case GridAffine::Kind::reflect: {
      for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t r = (n - j) % n;
        out[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(r)];
      }
      break;
    }
    case GridAffine::Kind::dilate: {
      std::int64_t cinv = mod_inverse_pow2(l.param, n);
      for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t r = (j * cinv) % n;
        if (r < 0) r += n;
        out[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(r)];
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

struct AffineInvarianceReport {
  double estimate_base = 0;
  double estimate_composed = 0;
  double relative_gap = 0;
};

/// Lower estimates for m and m o l with conjugated start vectors; the true
/// norms are equal, so the relative gap measures numerical defect only.
inline AffineInvarianceReport affine_invariance_check(const MultiplierSymbol& m,
                                                      const GridAffine& l, double p,
                                                      LowerBoundOptions opt = {}) {
  GridDomain dom = GridDomain::torus(m.dim(), m.n());
  LowerBoundOptions base_opt = opt;
  base_opt.dual_sweep = false;
  // shared random starts
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng(mix_seed(opt.seed, 0xAFFu + static_cast<std::uint64_t>(r)));
    GridSignal g(dom);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.gaussian_complex();
    base_opt.starts.push_back(std::move(g));
  }
  LowerBoundOptions comp_opt = base_opt;
  comp_opt.starts.clear();
  for (const auto& s : base_opt.starts) comp_opt.starts.push_back(detail::conjugate_start(s, l));

  MultiplierSymbol composed = compose_affine(m, l);
  AffineInvarianceReport rep;
  rep.estimate_base = lower_bound(m, p, base_opt).value;
  rep.estimate_composed = lower_bound(composed, p, comp_opt).value;
  double denom = std::max(rep.estimate_base, rep.estimate_composed);
  rep.relative_gap = denom == 0 ? 0 : std::abs(rep.estimate_base - rep.estimate_composed) / denom;
  return rep;
}

}  // namespace multihomeo
