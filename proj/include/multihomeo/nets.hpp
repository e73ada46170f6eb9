#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multihomeo/dyadic.hpp"
#include "multihomeo/interval.hpp"
#include "multihomeo/rng.hpp"

namespace multihomeo {

/// Address (s_1, ..., s_nu) of an interval of rank nu inside a net.
struct NetAddress {
  std::vector<std::int64_t> path;

  NetAddress() = default;
  explicit NetAddress(std::vector<std::int64_t> p) : path(std::move(p)) {}
  NetAddress(std::initializer_list<std::int64_t> p) : path(p) {}

  int rank() const { return static_cast<int>(path.size()); }

  NetAddress child(std::int64_t s) const {
    NetAddress a = *this;
    a.path.push_back(s);
    return a;
  }

  NetAddress parent() const {
    if (path.empty()) throw std::domain_error("NetAddress: root has no parent");
    NetAddress a = *this;
    a.path.pop_back();
    return a;
  }

  friend bool operator==(const NetAddress& a, const NetAddress& b) { return a.path == b.path; }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(path[i]);
    }
    s += ")";
    return s;
  }
};

/// k-th interval of the dyadic partition of the real line:
/// (2^{k-1}, 2^k) for k >= 1, (-1, 1) for k = 0, (-2^{-k}, -2^{-k-1}) for k <= -1.
inline Interval dyadic_line(std::int64_t k) {
  if (k >= 1) return Interval::bounded(Dyadic::pow2(k - 1), Dyadic::pow2(k));
  if (k == 0) return Interval::bounded(Dyadic::from_int(-1), Dyadic::from_int(1));
  return Interval::bounded(-Dyadic::pow2(-k), -Dyadic::pow2(-k - 1));
}

/// k-th interval of the dyadic partition of (0,1):
/// (1-2^{-k-1}, 1-2^{-k-2}) for k >= 1, (1/4, 3/4) for k = 0,
/// (2^{k-2}, 2^{k-1}) for k <= -1.
inline Interval dyadic_unit_child(std::int64_t k) {
  const Dyadic one = Dyadic::from_int(1);
  if (k >= 1) return Interval::bounded(one - Dyadic::pow2(-k - 1), one - Dyadic::pow2(-k - 2));
  if (k == 0) return Interval::bounded(Dyadic::pow2(-2), Dyadic::pow2(-2) * Dyadic::from_int(3));
  return Interval::bounded(Dyadic::pow2(k - 2), Dyadic::pow2(k - 1));
}

/// Dyadic partition of a bounded interval: the (0,1) rule mapped affinely.
inline Interval dyadic_interval(const Interval& parent, std::int64_t k) {
  if (!parent.is_bounded()) throw std::invalid_argument("dyadic_interval: parent must be bounded");
  Interval u = dyadic_unit_child(k);
  const Dyadic& a = parent.lo();
  Dyadic len = parent.length();
  return Interval::bounded(a + len * u.lo(), a + len * u.hi());
}

/// Result of locating a point inside a net at a requested rank.
struct LocateResult {
  bool on_endpoint = false;
  NetAddress address;        // interior case: containing address of the requested rank
  NetAddress left_address;   // endpoint case: interval whose right end is the point
  NetAddress right_address;  // endpoint case: interval whose left end is the point
  int hit_rank = 0;          // rank at which the point met a partition endpoint
};

namespace detail {

/// Classify an exact u in (0,1) against the dyadic (0,1) rule.
/// Returns child index, or the pair of children sharing u when u is a rule endpoint.
struct UnitPos {
  bool boundary = false;
  std::int64_t child = 0;
  std::int64_t left = 0, right = 0;
};

inline UnitPos classify_unit(const Dyadic& u) {
  static const Dyadic quarter = Dyadic::pow2(-2);
  static const Dyadic three_quarters = Dyadic::pow2(-2) * Dyadic::from_int(3);
  UnitPos pos;
  int cq = u.compare(quarter);
  int c3q = u.compare(three_quarters);
  if (cq == 0) {
    pos.boundary = true;
    pos.left = -1;
    pos.right = 0;
    return pos;
  }
  if (c3q == 0) {
    pos.boundary = true;
    pos.left = 0;
    pos.right = 1;
    return pos;
  }
  if (cq > 0 && c3q < 0) {
    pos.child = 0;
    return pos;
  }
  if (cq < 0) {
    std::int64_t e = u.floor_log2();  // e <= -3 here
    if (u.is_pow2()) {
      pos.boundary = true;
      pos.left = e + 1;
      pos.right = e + 2;
      return pos;
    }
    pos.child = e + 2;
    return pos;
  }
  Dyadic v = Dyadic::from_int(1) - u;  // 0 < v < 1/4
  std::int64_t e = v.floor_log2();
  if (v.is_pow2()) {
    pos.boundary = true;
    pos.left = -e - 2;
    pos.right = -e - 1;
    return pos;
  }
  pos.child = -e - 2;
  return pos;
}

}  // namespace detail

struct BetaOptions {
  bool jitter = false;
  std::uint64_t seed = 0;
};

/// Split (lo, hi) into the minimal number of pieces of length <= delta.
/// Equal pieces by default; jittered unequal pieces when a seed stream is given.
/// Piece lengths are verified exactly (as dyadic rationals) and the count is
/// increased until every piece fits.  Returns the n+1 boundary points.
inline std::vector<double> split_points(double lo, double hi, double delta, bool jitter,
                                        std::uint64_t seed) {
  if (!(delta > 0)) throw std::invalid_argument("split_points: delta must be positive");
  double len = hi - lo;
  if (!(len > 0)) throw std::invalid_argument("split_points: empty interval");
  const Dyadic dlo = Dyadic::from_double(lo);
  const Dyadic dhi = Dyadic::from_double(hi);
  const Dyadic dd = Dyadic::from_double(delta);
  auto n0 = static_cast<std::int64_t>(std::ceil(len / delta));
  if (n0 < 1) n0 = 1;
  for (std::int64_t n = n0;; ++n) {
    std::vector<double> e(static_cast<std::size_t>(n) + 1);
    e.front() = lo;
    e.back() = hi;
    if (jitter) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
      std::vector<double> w(static_cast<std::size_t>(n));
      double total = 0;
      for (auto& wi : w) {
        wi = rng.uniform(0.55, 1.45);
        total += wi;
      }
      double acc = 0;
      for (std::int64_t i = 1; i < n; ++i) {
        acc += w[static_cast<std::size_t>(i - 1)];
        e[static_cast<std::size_t>(i)] = lo + len * (acc / total);
      }
    } else {
      for (std::int64_t i = 1; i < n; ++i)
        e[static_cast<std::size_t>(i)] = lo + len * (static_cast<double>(i) / static_cast<double>(n));
    }
    bool ok = true;
    Dyadic prev = dlo;
    for (std::size_t i = 1; i < e.size() && ok; ++i) {
      Dyadic cur = (i + 1 == e.size()) ? dhi : Dyadic::from_double(e[i]);
      if (!(prev < cur) || (cur - prev) > dd) ok = false;
      prev = cur;
    }
    if (ok) return e;
    if (n > n0 + 64) throw std::runtime_error("split_points: no admissible split (resolution)");
  }
}

/// Recursively nested ordered interval partitions of the line.
///
/// alpha: dyadic partition of R at rank 1, dyadic partition of each interval below;
///        all endpoints are exact dyadic rationals, children are Z-indexed.
/// beta:  rank-1 intervals ((k-1)*delta_1, k*delta_1); each bounded parent of rank nu
///        splits into finitely many pieces of length <= delta_{nu+1}, indexed 0..n-1.
class Net {
 public:
  enum class Kind { alpha, beta };

  static Net alpha() { return Net(Kind::alpha, {}, {}); }

  static Net beta(std::vector<double> delta, BetaOptions opts = {}) {
    if (delta.empty()) throw std::invalid_argument("Net::beta: delta sequence empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double d : delta) {
      if (!(d > 0)) throw std::invalid_argument("Net::beta: delta must be positive");
      if (d > prev) throw std::invalid_argument("Net::beta: delta must be nonincreasing");
      prev = d;
    }
    return Net(Kind::beta, std::move(delta), opts);
  }

  Kind kind() const { return kind_; }
  bool finite_children() const { return kind_ == Kind::beta; }
  const BetaOptions& options() const { return opts_; }

  /// delta_rank for rank >= 1; continues by halving past the provided prefix.
  double delta(int rank) const {
    if (kind_ != Kind::beta) throw std::domain_error("Net: delta only defined for beta nets");
    if (rank < 1) throw std::invalid_argument("Net: rank must be >= 1");
    auto idx = static_cast<std::size_t>(rank - 1);
    if (idx < delta_.size()) return delta_[idx];
    double d = delta_.back();
    for (std::size_t i = delta_.size(); i <= idx; ++i) d *= 0.5;
    return d;
  }

  Interval root_interval(std::int64_t k) const {
    if (kind_ == Kind::alpha) return dyadic_line(k);
    double d1 = delta_[0];
    double lo = static_cast<double>(k - 1) * d1;
    double hi = static_cast<double>(k) * d1;
    return Interval::bounded(lo, hi);
  }

  /// Seed stream attached to an address (jitter reproducibility).
  std::uint64_t address_seed(const NetAddress& addr) const {
    std::uint64_t s = opts_.seed;
    for (std::int64_t p : addr.path) s = mix_seed(s, static_cast<std::uint64_t>(p) + 0x8000000000000000ull);
    return s;
  }

  /// Number of children of a bounded parent (beta nets only; alpha is Z-indexed).
  std::int64_t child_count(const NetAddress& parent_addr, const Interval& parent) const {
    if (kind_ != Kind::beta) throw std::domain_error("Net: alpha children are Z-indexed");
    auto e = beta_split(parent_addr, parent);
    return static_cast<std::int64_t>(e.size()) - 1;
  }

  Interval child_interval(const NetAddress& parent_addr, const Interval& parent,
                          std::int64_t s) const {
    if (!parent.is_bounded()) throw std::invalid_argument("Net: parent must be bounded");
    if (kind_ == Kind::alpha) return dyadic_interval(parent, s);
    auto e = beta_split(parent_addr, parent);
    auto n = static_cast<std::int64_t>(e.size()) - 1;
    if (s < 0 || s >= n) throw std::out_of_range("Net: beta child index out of range");
    return Interval::bounded(e[static_cast<std::size_t>(s)], e[static_cast<std::size_t>(s) + 1]);
  }

  Interval interval_at(const NetAddress& addr) const {
    if (addr.path.empty()) throw std::invalid_argument("Net: empty address");
    Interval iv = root_interval(addr.path[0]);
    NetAddress prefix({addr.path[0]});
    for (std::size_t i = 1; i < addr.path.size(); ++i) {
      iv = child_interval(prefix, iv, addr.path[i]);
      prefix = prefix.child(addr.path[i]);
    }
    return iv;
  }

  /// Unique address of the requested rank whose interval contains x,
  /// or the pair of addresses sharing x when x is a partition endpoint.
  LocateResult locate(const Dyadic& x, int rank) const {
    if (rank < 1) throw std::invalid_argument("Net: rank must be >= 1");
    LocateResult res;
    std::int64_t k0;
    {
      auto root = locate_root(x);
      if (root.boundary) {
        res.on_endpoint = true;
        res.hit_rank = 1;
        res.left_address = NetAddress({root.left});
        res.right_address = NetAddress({root.right});
        return res;
      }
      k0 = root.child;
    }
    NetAddress addr({k0});
    Interval iv = root_interval(k0);
    for (int r = 2; r <= rank; ++r) {
      if (kind_ == Kind::alpha) {
        Dyadic u = (x - iv.lo()).ldexp(-iv.length().floor_log2());
        auto pos = detail::classify_unit(u);
        if (pos.boundary) {
          res.on_endpoint = true;
          res.hit_rank = r;
          res.left_address = addr.child(pos.left);
          res.right_address = addr.child(pos.right);
          return res;
        }
        addr = addr.child(pos.child);
        iv = dyadic_interval(iv, pos.child);
      } else {
        auto e = beta_split(addr, iv);
        std::int64_t childs = -1;
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
          Dyadic b = Dyadic::from_double(e[i + 1]);
          int c = x.compare(b);
          if (c == 0) {
            res.on_endpoint = true;
            res.hit_rank = r;
            res.left_address = addr.child(static_cast<std::int64_t>(i));
            res.right_address = addr.child(static_cast<std::int64_t>(i) + 1);
            return res;
          }
          if (c < 0) {
            childs = static_cast<std::int64_t>(i);
            break;
          }
        }
        if (childs < 0) childs = static_cast<std::int64_t>(e.size()) - 2;
        iv = Interval::bounded(e[static_cast<std::size_t>(childs)],
                               e[static_cast<std::size_t>(childs) + 1]);
        addr = addr.child(childs);
      }
    }
    res.address = addr;
    return res;
  }

  LocateResult locate(double x, int rank) const { return locate(Dyadic::from_double(x), rank); }

  /// Interior address with the convention that an endpoint belongs to the
  /// cell on its left (used when assigning grid points to cells).  The right
  /// endpoint of an interval is not attained by any of its children, so the
  /// left cell is resolved by stepping just inside the left interval.
  NetAddress locate_cell(const Dyadic& x, int rank) const {
    LocateResult r = locate(x, rank);
    if (!r.on_endpoint) return r.address;
    if (r.left_address.rank() == rank) return r.left_address;
    Interval left = interval_at(r.left_address);
    // probe offset with a non-power-of-two mantissa stays interior at all ranks
    for (std::int64_t e = 80;; e += 80) {
      Dyadic probe = x - (left.length() * Dyadic::from_int(3)).ldexp(-e);
      LocateResult deeper = locate(probe, rank);
      if (!deeper.on_endpoint) return deeper.address;
      if (deeper.left_address.rank() == rank) return deeper.left_address;
      if (e > 4000) throw std::runtime_error("Net: locate_cell failed to resolve endpoint");
    }
  }

 private:
  Net(Kind k, std::vector<double> delta, BetaOptions opts)
      : kind_(k), delta_(std::move(delta)), opts_(opts) {}

  detail::UnitPos locate_root(const Dyadic& x) const {
    detail::UnitPos pos;
    if (kind_ == Kind::alpha) {
      static const Dyadic one = Dyadic::from_int(1);
      if (x.is_zero() || (x.abs() < one)) {
        pos.child = 0;
        return pos;
      }
      if (x == one) {
        pos.boundary = true;
        pos.left = 0;
        pos.right = 1;
        return pos;
      }
      if (x == -one) {
        pos.boundary = true;
        pos.left = -1;
        pos.right = 0;
        return pos;
      }
      std::int64_t e = x.abs().floor_log2();
      if (x.sign() > 0) {
        if (x.is_pow2()) {
          pos.boundary = true;
          pos.left = e;
          pos.right = e + 1;
          return pos;
        }
        pos.child = e + 1;
        return pos;
      }
      if ((-x).is_pow2()) {
        // -2^e is the right end of I_{-e-1} and the left end of I_{-e}
        pos.boundary = true;
        pos.left = -e - 1;
        pos.right = -e;
        return pos;
      }
      pos.child = -e - 1;
      return pos;
    }
    // beta root: interval k is ((k-1)*d1, k*d1)
    double d1 = delta_[0];
    double xd = x.to_double();
    auto k = static_cast<std::int64_t>(std::floor(xd / d1)) + 1;
    for (int guard = 0; guard < 8; ++guard) {
      Dyadic lo = Dyadic::from_double(static_cast<double>(k - 1) * d1);
      Dyadic hi = Dyadic::from_double(static_cast<double>(k) * d1);
      int clo = x.compare(lo), chi = x.compare(hi);
      if (clo == 0) {
        pos.boundary = true;
        pos.left = k - 1;
        pos.right = k;
        return pos;
      }
      if (chi == 0) {
        pos.boundary = true;
        pos.left = k;
        pos.right = k + 1;
        return pos;
      }
      if (clo > 0 && chi < 0) {
        pos.child = k;
        return pos;
      }
      k += (clo < 0) ? -1 : 1;
    }
    throw std::runtime_error("Net: beta root location failed");
  }

  std::vector<double> beta_split(const NetAddress& parent_addr, const Interval& parent) const {
    int parent_rank = parent_addr.rank();
    double d = delta(parent_rank + 1);
    return split_points(parent.lo_double(), parent.hi_double(), d, opts_.jitter,
                        address_seed(parent_addr));
  }

  Kind kind_;
  std::vector<double> delta_;
  BetaOptions opts_;
};

/// Product of d same-rank intervals with its center.
struct RankedRectangle {
  std::vector<NetAddress> addresses;  // one per axis
  std::vector<Interval> factors;
  std::vector<Dyadic> center_exact;  // finite factors only
  std::vector<double> center;
  int rank = 0;
};

struct IndexRange {
  std::int64_t lo = 0, hi = -1;  // inclusive; empty when hi < lo
};

/// All rank-nu products with per-level factor indices inside the given windows
/// (the same window list applies to every axis).
inline std::vector<RankedRectangle> product_rectangles(const Net& net, int d, int rank,
                                                       const std::vector<IndexRange>& level_windows) {
  if (d < 1) throw std::invalid_argument("product_rectangles: d must be >= 1");
  if (static_cast<int>(level_windows.size()) != rank)
    throw std::invalid_argument("product_rectangles: need one index window per level");
  // enumerate rank-nu addresses within the windows
  std::vector<std::pair<NetAddress, Interval>> cur;
  for (std::int64_t k = level_windows[0].lo; k <= level_windows[0].hi; ++k)
    cur.emplace_back(NetAddress({k}), net.root_interval(k));
  for (int level = 2; level <= rank; ++level) {
    std::vector<std::pair<NetAddress, Interval>> next;
    const IndexRange& w = level_windows[static_cast<std::size_t>(level - 1)];
    for (const auto& [addr, iv] : cur) {
      std::int64_t lo = w.lo, hi = w.hi;
      if (net.finite_children()) {
        std::int64_t n = net.child_count(addr, iv);
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, n - 1);
      }
      for (std::int64_t s = lo; s <= hi; ++s)
        next.emplace_back(addr.child(s), net.child_interval(addr, iv, s));
    }
    cur = std::move(next);
  }
  // d-fold Cartesian products
  std::vector<RankedRectangle> out;
  if (cur.empty()) return out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    RankedRectangle rect;
    rect.rank = rank;
    for (int ax = 0; ax < d; ++ax) {
      const auto& [addr, iv] = cur[idx[static_cast<std::size_t>(ax)]];
      rect.addresses.push_back(addr);
      rect.factors.push_back(iv);
      Dyadic c = iv.midpoint();
      rect.center.push_back(c.to_double());
      rect.center_exact.push_back(std::move(c));
    }
    out.push_back(std::move(rect));
    int ax = d - 1;
    while (ax >= 0) {
      if (++idx[static_cast<std::size_t>(ax)] < cur.size()) break;
      idx[static_cast<std::size_t>(ax)] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return out;
}

inline std::vector<RankedRectangle> product_rectangles(const Net& net, int d, int rank,
                                                       IndexRange window) {
  return product_rectangles(net, d, rank, std::vector<IndexRange>(static_cast<std::size_t>(rank), window));
}

}  // namespace multihomeo
