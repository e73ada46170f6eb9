#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "multihomeo/nets.hpp"

namespace multihomeo {

struct PhiResult {
  double value = 0;
  int rank = 0;                   // rank of the deepest matched pair used
  double target_length = 0;       // length of that pair's target interval
  bool exact_endpoint = false;    // x hit a partition endpoint; value is exact
  bool resolution_limited = false;  // stopped by max_rank or by double resolution
};

/// Line homeomorphism determined by interval-net correspondence.
///
/// The source net is the dyadic net (Z-indexed children, exact endpoints).
/// Each source interval is matched with a target interval; the matched
/// children of a pair are built from the target net's subdivision policy:
/// the minimal equal (or jittered) split into pieces no longer than the
/// target's next delta, with the outermost pieces refined into geometric
/// tails (midpoint cuts, or seeded off-center cuts under jitter) so that
/// the matching is defined for every integer child index.  Rank-nu matched
/// targets therefore never exceed delta_nu in length, and every source
/// endpoint has an exactly computed image.
///
/// Between endpoints of the deepest evaluated rank the map interpolates
/// affinely; the choice never affects endpoint images or the per-interval
/// length bounds.
///
/// Descent stops at the first matched pair whose target is no longer than
/// `tolerance` (or at `max_rank`).  Endpoints of ranks up to the stopping
/// rank are returned exactly; deeper endpoints are interpolated like any
/// interior point, which keeps the evaluated map monotone.  Build with
/// tolerance 0 to get endpoint-exact evaluation through max_rank.
class NetHomeo {
 public:
  NetHomeo(Net source, Net target, int max_rank = 12, double tolerance = 0x1.0p-16)
      : source_(std::move(source)),
        target_(std::move(target)),
        max_rank_(max_rank),
        tolerance_(tolerance) {
    if (source_.kind() != Net::Kind::alpha)
      throw std::invalid_argument("NetHomeo: source must be the dyadic net");
    if (max_rank_ < 1) throw std::invalid_argument("NetHomeo: max_rank must be >= 1");
    if (tolerance_ < 0) throw std::invalid_argument("NetHomeo: tolerance must be >= 0");
  }

  int max_rank() const { return max_rank_; }
  double tolerance() const { return tolerance_; }
  const Net& source_net() const { return source_; }
  const Net& target_net() const { return target_; }

  struct TargetCell {
    double lo = 0, hi = 0;
    std::uint64_t seed = 0;
  };

  PhiResult eval_detail(double x) const {
    Dyadic X = Dyadic::from_double(x);
    PhiResult res;
    auto root = source_root_classify(X);
    if (root.boundary) {
      res.value = root_boundary_value(root.right);
      res.rank = 1;
      res.exact_endpoint = true;
      return res;
    }
    Interval I = dyadic_line(root.child);
    TargetCell T = root_cell(root.child);
    int rank = 1;
    bool limited = false;
    while ((T.hi - T.lo) > tolerance_ && rank < max_rank_) {
      Dyadic u = (X - I.lo()).ldexp(-I.length().floor_log2());
      auto pos = detail::classify_unit(u);
      if (pos.boundary) {
        res.value = child_cell(T, rank, pos.right).lo;
        res.rank = rank + 1;
        res.exact_endpoint = true;
        return res;
      }
      TargetCell C = child_cell(T, rank, pos.child);
      if (!(C.lo < C.hi)) {
        limited = true;  // double resolution exhausted below this scale
        break;
      }
      I = dyadic_interval(I, pos.child);
      T = C;
      ++rank;
    }
    double len = T.hi - T.lo;
    double lambda = (X - I.lo()).ldexp(-I.length().floor_log2()).to_double();
    lambda = std::clamp(lambda, 0.0, 1.0);
    res.value = std::clamp(T.lo + lambda * len, T.lo, T.hi);
    res.rank = rank;
    res.target_length = len;
    res.resolution_limited = limited || (len > tolerance_ && rank >= max_rank_);
    return res;
  }

  double operator()(double x) const { return eval_detail(x).value; }

  PhiResult inverse_detail(double y) const {
    PhiResult res;
    auto root = target_root_classify(y);
    if (root.boundary) {
      res.value = dyadic_line(root.right).lo().to_double();
      res.rank = 1;
      res.exact_endpoint = true;
      return res;
    }
    Interval I = dyadic_line(root.child);
    TargetCell T = root_cell(root.child);
    int rank = 1;
    bool limited = false;
    while (I.length().to_double() > tolerance_ && rank < max_rank_) {
      auto pos = locate_in_cell(T, rank, y);
      if (pos.boundary) {
        res.value = dyadic_interval(I, pos.right).lo().to_double();
        res.rank = rank + 1;
        res.exact_endpoint = true;
        return res;
      }
      TargetCell C = child_cell(T, rank, pos.child);
      if (!(C.lo < C.hi)) {
        limited = true;
        break;
      }
      I = dyadic_interval(I, pos.child);
      T = C;
      ++rank;
    }
    double tlen = T.hi - T.lo;
    double mu = tlen > 0 ? (y - T.lo) / tlen : 0.0;
    mu = std::clamp(mu, 0.0, 1.0);
    double a = I.lo().to_double(), b = I.hi().to_double();
    res.value = std::clamp(a + mu * (b - a), a, b);
    res.rank = rank;
    res.target_length = tlen;
    res.resolution_limited = limited || (I.length().to_double() > tolerance_ && rank >= max_rank_);
    return res;
  }

  double inverse(double y) const { return inverse_detail(y).value; }

  Interval source_interval(const NetAddress& addr) const { return source_.interval_at(addr); }

  /// Matched target interval of a source address.
  TargetCell target_cell(const NetAddress& addr) const {
    if (addr.path.empty()) throw std::invalid_argument("NetHomeo: empty address");
    TargetCell T = root_cell(addr.path[0]);
    for (std::size_t i = 1; i < addr.path.size(); ++i) {
      T = child_cell(T, static_cast<int>(i), addr.path[i]);
      if (!(T.lo < T.hi)) throw std::runtime_error("NetHomeo: target cell below double resolution");
    }
    return T;
  }

  /// Matched image of the boundary shared by source children s-1 and s of the
  /// given parent pair; exposed so tests can cross-check endpoint images.
  double child_boundary(const TargetCell& parent, int parent_rank, std::int64_t s) const {
    return child_cell(parent, parent_rank, s).lo;
  }

  TargetCell root_cell(std::int64_t k) const {
    if (target_.kind() == Net::Kind::alpha) {
      Interval iv = dyadic_line(k);
      return {iv.lo_double(), iv.hi_double(), mix_seed(target_.options().seed, encode(k))};
    }
    double d1 = target_.delta(1);
    return {static_cast<double>(k) * d1, static_cast<double>(k + 1) * d1,
            mix_seed(target_.options().seed, encode(k))};
  }

  /// Matched child cell for any integer child index.
  TargetCell child_cell(const TargetCell& parent, int parent_rank, std::int64_t s) const {
    std::uint64_t child_seed = mix_seed(parent.seed, encode(s));
    if (target_.kind() == Net::Kind::alpha) {
      Interval iv = dyadic_interval(Interval::bounded(Dyadic::from_double(parent.lo),
                                                      Dyadic::from_double(parent.hi)),
                                    s);
      return {iv.lo_double(), iv.hi_double(), child_seed};
    }
    auto e = split(parent, parent_rank);
    auto n = static_cast<std::int64_t>(e.size()) - 1;
    double lo, hi;
    if (n == 1) {
      auto [q1, q3] = central_cuts(e[0], e[1], parent.seed);
      if (s == 0) {
        lo = q1;
        hi = q3;
      } else if (s < 0) {
        hi = ladder_down(e[0], q1, parent.seed, -1 - s);
        lo = cut_down(e[0], hi, parent.seed, static_cast<std::uint64_t>(-s));
      } else {
        lo = ladder_up(q3, e[1], parent.seed, s - 1);
        hi = cut_up(lo, e[1], parent.seed, static_cast<std::uint64_t>(s));
      }
      return {lo, hi, child_seed};
    }
    std::int64_t m = n - 2;
    std::int64_t sF = m >= 1 ? -((m - 1) / 2) : 1;
    std::int64_t sL = m >= 1 ? sF + m - 1 : 0;
    if (m >= 1 && s >= sF && s <= sL) {
      lo = e[static_cast<std::size_t>(s - sF + 1)];
      hi = e[static_cast<std::size_t>(s - sF + 2)];
    } else if (s < sF) {
      // geometric tail inside the first piece, accumulating at parent.lo
      hi = ladder_down(e[0], e[1], parent.seed, sF - 1 - s);
      lo = cut_down(e[0], hi, parent.seed, static_cast<std::uint64_t>(sF - s));
    } else {
      // geometric tail inside the last piece, accumulating at parent.hi
      lo = ladder_up(e[static_cast<std::size_t>(n) - 1], e[static_cast<std::size_t>(n)], parent.seed,
                     s - (sL + 1));
      hi = cut_up(lo, e[static_cast<std::size_t>(n)], parent.seed,
                  static_cast<std::uint64_t>(s - sL));
    }
    return {lo, hi, child_seed};
  }

 private:
  Net source_;
  Net target_;
  int max_rank_;
  double tolerance_;

  static std::uint64_t encode(std::int64_t s) {
    return static_cast<std::uint64_t>(s) + 0x8000000000000000ull;
  }

  static constexpr std::uint64_t kSaltDown = 0x1d0ull << 32;
  static constexpr std::uint64_t kSaltUp = 0x2d1ull << 32;
  static constexpr std::uint64_t kSaltCut = 0x3d2ull << 32;

  double theta(std::uint64_t seed, std::uint64_t salt) const {
    if (!target_.options().jitter) return 0.5;
    std::uint64_t s = mix_seed(seed, salt);
    double u = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    return 0.35 + 0.3 * u;
  }

  // interior cut of (a, b), clamped strictly inside when representable
  static double place(double a, double b, double th) {
    double v = a + (b - a) * th;
    return std::clamp(v, a, b);
  }

  double cut_down(double lo, double hi, std::uint64_t seed, std::uint64_t step) const {
    return place(lo, hi, theta(seed, kSaltDown + step));
  }

  double cut_up(double lo, double hi, std::uint64_t seed, std::uint64_t step) const {
    return place(lo, hi, 1.0 - theta(seed, kSaltUp + step));
  }

  // i cut steps from hi toward lo: the i-th ladder value below hi
  double ladder_down(double lo, double hi, std::uint64_t seed, std::int64_t i) const {
    double t = hi;
    for (std::int64_t k = 1; k <= i; ++k) t = cut_down(lo, t, seed, static_cast<std::uint64_t>(k));
    return t;
  }

  double ladder_up(double lo, double hi, std::uint64_t seed, std::int64_t i) const {
    double t = lo;
    for (std::int64_t k = 1; k <= i; ++k) t = cut_up(t, hi, seed, static_cast<std::uint64_t>(k));
    return t;
  }

  // the two interior cut points of a single-piece cell (middle child between them)
  std::pair<double, double> central_cuts(double lo, double hi, std::uint64_t seed) const {
    double m0 = place(lo, hi, theta(seed, kSaltCut));
    double q1 = place(lo, m0, theta(seed, kSaltCut + 1));
    double q3 = place(m0, hi, 1.0 - theta(seed, kSaltCut + 2));
    return {q1, q3};
  }

  std::vector<double> split(const TargetCell& cell, int parent_rank) const {
    return split_points(cell.lo, cell.hi, target_.delta(parent_rank + 1),
                        target_.options().jitter, cell.seed);
  }

  detail::UnitPos source_root_classify(const Dyadic& x) const {
    auto res = source_.locate(x, 1);
    detail::UnitPos pos;
    if (res.on_endpoint) {
      pos.boundary = true;
      pos.left = res.left_address.path[0];
      pos.right = res.right_address.path[0];
    } else {
      pos.child = res.address.path[0];
    }
    return pos;
  }

  double root_boundary_value(std::int64_t k) const {
    // boundary shared by target roots k-1 and k
    if (target_.kind() == Net::Kind::alpha) return dyadic_line(k).lo_double();
    return static_cast<double>(k) * target_.delta(1);
  }

  detail::UnitPos target_root_classify(double y) const {
    detail::UnitPos pos;
    if (target_.kind() == Net::Kind::alpha) {
      auto res = Net::alpha().locate(Dyadic::from_double(y), 1);
      if (res.on_endpoint) {
        pos.boundary = true;
        pos.left = res.left_address.path[0];
        pos.right = res.right_address.path[0];
      } else {
        pos.child = res.address.path[0];
      }
      return pos;
    }
    double d1 = target_.delta(1);
    auto k = static_cast<std::int64_t>(std::floor(y / d1));
    for (int guard = 0; guard < 8; ++guard) {
      double lo = static_cast<double>(k) * d1;
      double hi = static_cast<double>(k + 1) * d1;
      if (y == lo) {
        pos.boundary = true;
        pos.left = k - 1;
        pos.right = k;
        return pos;
      }
      if (y == hi) {
        pos.boundary = true;
        pos.left = k;
        pos.right = k + 1;
        return pos;
      }
      if (lo < y && y < hi) {
        pos.child = k;
        return pos;
      }
      k += (y < lo) ? -1 : 1;
    }
    throw std::runtime_error("NetHomeo: target root location failed");
  }

  /// Mirror of classify_unit on the matched target cells.
  detail::UnitPos locate_in_cell(const TargetCell& T, int parent_rank, double y) const {
    detail::UnitPos pos;
    if (target_.kind() == Net::Kind::alpha) {
      Interval iv = Interval::bounded(Dyadic::from_double(T.lo), Dyadic::from_double(T.hi));
      Dyadic u = (Dyadic::from_double(y) - iv.lo()).ldexp(-iv.length().floor_log2());
      return detail::classify_unit(u);
    }
    auto e = split(T, parent_rank);
    auto n = static_cast<std::int64_t>(e.size()) - 1;
    if (n == 1) {
      auto [q1, q3] = central_cuts(e[0], e[1], T.seed);
      if (y == q1) return boundary(-1, 0);
      if (y == q3) return boundary(0, 1);
      if (q1 < y && y < q3) return child(0);
      if (y < q1) return tail_walk_left(e[0], q1, -1, y, T.seed);
      return tail_walk_right(q3, e[1], 1, y, T.seed);
    }
    std::int64_t m = n - 2;
    std::int64_t sF = m >= 1 ? -((m - 1) / 2) : 1;
    std::int64_t sL = m >= 1 ? sF + m - 1 : 0;
    if (m >= 1) {
      if (y == e[1]) return boundary(sF - 1, sF);
      if (y == e[static_cast<std::size_t>(n) - 1]) return boundary(sL, sL + 1);
      if (e[1] < y && y < e[static_cast<std::size_t>(n) - 1]) {
        // binary search the equal pieces
        std::size_t lo = 1, hi = static_cast<std::size_t>(n) - 1;
        while (lo + 1 < hi) {
          std::size_t midi = (lo + hi) / 2;
          if (e[midi] == y) return boundary(sF + static_cast<std::int64_t>(midi) - 2,
                                            sF + static_cast<std::int64_t>(midi) - 1);
          (e[midi] < y ? lo : hi) = midi;
        }
        return child(sF + static_cast<std::int64_t>(lo) - 1);
      }
      if (y < e[1]) return tail_walk_left(e[0], e[1], sF - 1, y, T.seed);
      return tail_walk_right(e[static_cast<std::size_t>(n) - 1], e[static_cast<std::size_t>(n)],
                             sL + 1, y, T.seed);
    }
    // n == 2
    if (y == e[1]) return boundary(0, 1);
    if (y < e[1]) return tail_walk_left(e[0], e[1], 0, y, T.seed);
    return tail_walk_right(e[1], e[2], 1, y, T.seed);
  }

  static detail::UnitPos boundary(std::int64_t l, std::int64_t r) {
    detail::UnitPos p;
    p.boundary = true;
    p.left = l;
    p.right = r;
    return p;
  }

  static detail::UnitPos child(std::int64_t s) {
    detail::UnitPos p;
    p.child = s;
    return p;
  }

  // y < hi inside (lo, hi); ladder C_{first}, C_{first-1}, ... accumulates at lo
  detail::UnitPos tail_walk_left(double lo, double hi, std::int64_t first, double y,
                                 std::uint64_t seed) const {
    double t = hi;
    for (std::int64_t s = first;; --s) {
      double next = cut_down(lo, t, seed, static_cast<std::uint64_t>(first - s + 1));
      if (next >= t || next <= lo) return child(s);  // resolution floor: stay in this cell
      if (y == next) return boundary(s - 1, s);
      if (next < y) return child(s);
      t = next;
      if (first - s > 4000) return child(s);
    }
  }

  detail::UnitPos tail_walk_right(double lo, double hi, std::int64_t first, double y,
                                  std::uint64_t seed) const {
    double t = lo;
    for (std::int64_t s = first;; ++s) {
      double next = cut_up(t, hi, seed, static_cast<std::uint64_t>(s - first + 1));
      if (next <= t || next >= hi) return child(s);
      if (y == next) return boundary(s, s + 1);
      if (y < next) return child(s);
      t = next;
      if (s - first > 4000) return child(s);
    }
  }
};

/// Coordinatewise lift h(t) = (phi(t_1), ..., phi(t_d)).
class CoordinateHomeo {
 public:
  CoordinateHomeo(std::shared_ptr<const NetHomeo> phi, int d) : phi_(std::move(phi)), d_(d) {
    if (!phi_) throw std::invalid_argument("CoordinateHomeo: null map");
    if (d_ < 1) throw std::invalid_argument("CoordinateHomeo: dimension must be >= 1");
  }

  int dim() const { return d_; }
  const NetHomeo& phi() const { return *phi_; }

  void eval(std::span<const double> t, std::span<double> out) const {
    if (t.size() != static_cast<std::size_t>(d_) || out.size() != t.size())
      throw std::invalid_argument("CoordinateHomeo: dimension mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = (*phi_)(t[i]);
  }

  std::vector<double> eval(std::span<const double> t) const {
    std::vector<double> out(t.size());
    eval(t, std::span<double>(out));
    return out;
  }

 private:
  std::shared_ptr<const NetHomeo> phi_;
  int d_;
};

/// Circle homeomorphism phi_1 = phi o l, where l is the affine map taking
/// [0, 2pi] onto the preimage interval phi^{-1}([0, 2pi]).  The endpoints are
/// fixed by construction (the left one exactly, the right one pinned with the
/// measured defect recorded), so the map acts on the torus; the coordinatewise
/// lift is the torus self-map.
class TorusHomeo {
 public:
  TorusHomeo(std::function<double(double)> fwd, double j_lo, double j_hi,
             double defect_left = 0, double defect_right = 0)
      : fwd_(std::move(fwd)),
        j_lo_(j_lo),
        j_hi_(j_hi),
        defect_left_(defect_left),
        defect_right_(defect_right) {
    if (!(j_lo_ < j_hi_)) throw std::invalid_argument("TorusHomeo: degenerate preimage interval");
  }

  static constexpr double period() { return 2.0 * std::numbers::pi; }

  double l(double t) const { return j_lo_ + (j_hi_ - j_lo_) * (t / period()); }
  double l_offset() const { return j_lo_; }
  double l_scale() const { return (j_hi_ - j_lo_) / period(); }
  double right_defect() const { return defect_right_; }
  double left_defect() const { return defect_left_; }

  double operator()(double t) const {
    if (t <= 0) return 0.0;
    if (t >= period()) return period();
    return std::clamp(fwd_(l(t)), 0.0, period());
  }

  /// Componentwise action on torus coordinates reduced to [0, 2pi).
  void eval(std::span<const double> t, std::span<double> out) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      double u = std::fmod(t[i], period());
      if (u < 0) u += period();
      double v = (*this)(u);
      out[i] = v >= period() ? 0.0 : v;
    }
  }

 private:
  std::function<double(double)> fwd_;
  double j_lo_, j_hi_;
  double defect_left_, defect_right_;
};

inline TorusHomeo torus_adapt(std::shared_ptr<const NetHomeo> phi) {
  if (!phi) throw std::invalid_argument("torus_adapt: null map");
  double j_lo = phi->inverse(0.0);
  double j_hi = phi->inverse(TorusHomeo::period());
  double defect_left = std::abs((*phi)(j_lo));
  double defect_right = std::abs((*phi)(j_hi) - TorusHomeo::period());
  return TorusHomeo([phi](double u) { return (*phi)(u); }, j_lo, j_hi, defect_left, defect_right);
}

}  // namespace multihomeo
