#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace multihomeo {

/// Nondecreasing modulus of continuity with eval(0) = 0.
/// Subadditivity is not assumed.
class Modulus {
 public:
  enum class Source { analytic, grid };

  Modulus() : Modulus([](double) { return 0.0; }, Source::analytic, "zero") {}

  Modulus(std::function<double(double)> f, Source src, std::string name = "")
      : f_(std::move(f)), source_(src), name_(std::move(name)) {}

  double operator()(double delta) const {
    if (delta < 0) throw std::invalid_argument("Modulus: delta must be >= 0");
    if (delta == 0) return 0.0;
    return f_(delta);
  }

  Source source() const { return source_; }
  const std::string& name() const { return name_; }

  static Modulus zero() { return Modulus(); }

  static Modulus lipschitz(double L, double cap = std::numeric_limits<double>::infinity()) {
    return Modulus([L, cap](double d) { return std::min(cap, L * d); }, Source::analytic,
                   "lipschitz");
  }

  /// C * delta^alpha, capped.
  static Modulus holder(double C, double alpha,
                        double cap = std::numeric_limits<double>::infinity()) {
    if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("Modulus: alpha in (0,1]");
    return Modulus([C, alpha, cap](double d) { return std::min(cap, C * std::pow(d, alpha)); },
                   Source::analytic, "holder");
  }

  /// Pointwise maximum of a family of moduli.
  static Modulus max_of(std::vector<Modulus> parts) {
    if (parts.empty()) throw std::invalid_argument("Modulus: empty family");
    Source src = Source::analytic;
    for (const auto& m : parts)
      if (m.source() == Source::grid) src = Source::grid;
    return Modulus(
        [parts = std::move(parts)](double d) {
          double v = 0;
          for (const auto& m : parts) v = std::max(v, m(d));
          return v;
        },
        src, "max");
  }

 private:
  std::function<double(double)> f_;
  Source source_;
  std::string name_;
};

struct ModulusEstimate {
  double value = 0;
  bool spacing_flagged = false;  // grid spacing > delta: value may underestimate
};

/// sup of |f(t1)-f(t2)| over sample pairs at index distance <= delta/spacing.
/// Real samples: O(N) sliding max/min windows.
inline ModulusEstimate estimate_modulus(std::span<const double> samples, double spacing,
                                        double delta, bool periodic = false) {
  if (samples.empty()) throw std::invalid_argument("estimate_modulus: empty grid");
  if (delta < 0) throw std::invalid_argument("estimate_modulus: delta must be >= 0");
  ModulusEstimate out;
  out.spacing_flagged = spacing > delta;
  if (delta == 0 || samples.size() == 1) return out;
  auto w = static_cast<std::size_t>(std::floor(delta / spacing + 1e-12));
  if (w == 0) return out;
  std::size_t n = samples.size();
  std::size_t total = periodic ? n + w : n;
  auto at = [&](std::size_t i) { return samples[i % n]; };
  std::deque<std::size_t> maxq, minq;
  double best = 0;
  for (std::size_t i = 0; i < total; ++i) {
    while (!maxq.empty() && at(maxq.back()) <= at(i)) maxq.pop_back();
    maxq.push_back(i);
    while (!minq.empty() && at(minq.back()) >= at(i)) minq.pop_back();
    minq.push_back(i);
    while (maxq.front() + w < i) maxq.pop_front();
    while (minq.front() + w < i) minq.pop_front();
    best = std::max(best, at(maxq.front()) - at(minq.front()));
  }
  out.value = best;
  return out;
}

/// Complex samples: windowed pairwise scan.
inline ModulusEstimate estimate_modulus(std::span<const std::complex<double>> samples,
                                        double spacing, double delta, bool periodic = false) {
  if (samples.empty()) throw std::invalid_argument("estimate_modulus: empty grid");
  if (delta < 0) throw std::invalid_argument("estimate_modulus: delta must be >= 0");
  ModulusEstimate out;
  out.spacing_flagged = spacing > delta;
  if (delta == 0 || samples.size() == 1) return out;
  auto w = static_cast<std::size_t>(std::floor(delta / spacing + 1e-12));
  if (w == 0) return out;
  std::size_t n = samples.size();
  double best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t jmax = periodic ? i + w : std::min(n - 1, i + w);
    for (std::size_t j = i + 1; j <= jmax; ++j)
      best = std::max(best, std::abs(samples[j % n] - samples[i]));
  }
  out.value = best;
  return out;
}

/// Grid-estimated modulus wrapping sampled data.
inline Modulus modulus_from_samples(std::vector<double> samples, double spacing,
                                    bool periodic = false) {
  return Modulus(
      [samples = std::move(samples), spacing, periodic](double d) {
        return estimate_modulus(std::span<const double>(samples), spacing, d, periodic).value;
      },
      Modulus::Source::grid, "grid");
}

/// Evaluable member of a function family on R^d (or the torus), with an
/// analytic upper modulus and optionally sharper per-shell moduli on
/// { j <= |x| <= j+1 }.
struct FamilyMember {
  std::string name;
  std::function<double(std::span<const double>)> eval;
  Modulus modulus;                                  // global upper modulus
  std::function<Modulus(int)> shell_modulus;        // optional; defaults to the global one
  double sup_bound = 0;
  bool globally_uniform = true;  // false: equicontinuous on balls only, needs the radial step

  Modulus shell(int j) const { return shell_modulus ? shell_modulus(j) : modulus; }
};

/// Family of bounded functions with a common sup bound and a family modulus
/// dominating every member.
class FunctionFamily {
 public:
  FunctionFamily() = default;
  explicit FunctionFamily(std::vector<FamilyMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("FunctionFamily: empty family");
  }

  const std::vector<FamilyMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  double bound() const {
    double b = 0;
    for (const auto& m : members_) b = std::max(b, m.sup_bound);
    return b;
  }

  /// Family modulus: pointwise sup of the member moduli.
  Modulus modulus() const {
    std::vector<Modulus> parts;
    parts.reserve(members_.size());
    for (const auto& m : members_) parts.push_back(m.modulus);
    return Modulus::max_of(std::move(parts));
  }

  Modulus shell_modulus(int j) const {
    std::vector<Modulus> parts;
    parts.reserve(members_.size());
    for (const auto& m : members_) parts.push_back(m.shell(j));
    return Modulus::max_of(std::move(parts));
  }

  double modulus_at(double delta) const { return modulus()(delta); }

  /// Grid route: sup over members of the sampled modulus on a common 1-d grid.
  ModulusEstimate estimate(std::span<const double> grid_coords, double spacing, double delta,
                           bool periodic = false) const {
    ModulusEstimate best;
    for (const auto& m : members_) {
      std::vector<double> samples(grid_coords.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        double x = grid_coords[i];
        samples[i] = m.eval(std::span<const double>(&x, 1));
      }
      auto est = estimate_modulus(std::span<const double>(samples), spacing, delta, periodic);
      best.value = std::max(best.value, est.value);
      best.spacing_flagged = best.spacing_flagged || est.spacing_flagged;
    }
    return best;
  }

 private:
  std::vector<FamilyMember> members_;
};

namespace detail {

/// Largest x in (0, hi] with pred(x) true, for a monotone predicate that is
/// true near 0.  Returns the satisfying side of the bracket at relative
/// tolerance 2^-20.  Returns 0 when pred fails even at hi * 2^-120.
inline double bisect_largest(const std::function<bool(double)>& pred, double hi) {
  if (pred(hi)) return hi;
  double lo = hi * 0x1.0p-120;
  if (!pred(lo)) return 0.0;
  for (int it = 0; it < 200 && (hi - lo) > lo * 0x1.0p-20; ++it) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

/// Decreasing b_j in (0,1) with omega_j(b_j) <= 1/(j+1).
/// Bisection on each modulus; running minimum with a factor-1/2 fallback
/// enforces strict decrease; a default ladder 2^{-j-1} handles moduli whose
/// constraint is vacuous on (0,1).
inline std::vector<double> select_b(const std::function<Modulus(int)>& shell_omega, int count) {
  if (count < 1) throw std::invalid_argument("select_b: count must be >= 1");
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(count));
  double prev = 1.0;
  for (int j = 0; j < count; ++j) {
    Modulus omega = shell_omega(j);
    double target = 1.0 / static_cast<double>(j + 1);
    double cand;
    if (omega(1.0 - 0x1.0p-40) <= target) {
      cand = std::ldexp(1.0, -j - 1);  // vacuous constraint: default ladder
    } else {
      cand = detail::bisect_largest([&](double x) { return omega(x) <= target; },
                                    1.0 - 0x1.0p-40);
    }
    double bj = std::min(cand, prev);
    if (bj >= prev) bj = prev * 0.5;
    int guard = 0;
    while (bj > 0 && omega(bj) > target && guard++ < 2000) bj *= 0.5;
    if (!(bj > 0) || omega(bj) > target)
      throw std::runtime_error("select_b: modulus does not vanish at 0 (family not equicontinuous)");
    b.push_back(bj);
    prev = bj;
  }
  return b;
}

/// Model for the piecewise-constant-symbol norm constant c(p, nu).
/// power: (C * max(p, p/(p-1)))^{d*nu};  unit: identically 1.
struct CModel {
  enum class Kind { power, unit };
  Kind kind = Kind::power;
  double C = 8.0;
  int d = 1;

  double operator()(double p, int nu) const {
    if (kind == Kind::unit) return 1.0;
    if (!(p > 1)) throw std::invalid_argument("CModel: p must be > 1");
    double pp = std::max(p, p / (p - 1.0));
    return std::pow(C * pp, static_cast<double>(d) * static_cast<double>(nu));
  }

  std::string name() const { return kind == Kind::unit ? "unit" : "power"; }
};

struct DeltaSelection {
  std::vector<double> delta;    // delta_1 .. delta_count
  std::vector<bool> floored;    // true where the floor replaced the bisection result
  bool any_floored = false;
};

/// Positive decreasing delta_nu with
///   c_model(1 + 1/nu, nu) * omega(delta_{nu-1} * sqrt(d)) <= 2^{-nu},  nu >= 2.
/// Each delta found by bisection at relative tolerance 2^-20.  When a floor is
/// given, deltas that would fall below it are clamped (and flagged) instead of
/// failing; with floor = 0 an unreachable target is an error.
inline DeltaSelection select_delta(const Modulus& omega,
                                   const std::function<double(double, int)>& c_model, int d,
                                   int count, double floor_value = 0.0) {
  if (count < 1) throw std::invalid_argument("select_delta: count must be >= 1");
  if (d < 1) throw std::invalid_argument("select_delta: dimension must be >= 1");
  double sqrt_d = std::sqrt(static_cast<double>(d));
  DeltaSelection out;
  out.delta.reserve(static_cast<std::size_t>(count));
  out.floored.assign(static_cast<std::size_t>(count), false);
  double prev = 1.0;
  for (int idx = 1; idx <= count; ++idx) {
    int nu = idx + 1;  // constraint index for delta_{nu-1}
    double c = c_model(1.0 + 1.0 / static_cast<double>(nu), nu);
    if (!(c > 0)) throw std::invalid_argument("select_delta: c_model must be positive");
    double target = std::ldexp(1.0, -nu) / c;
    double cand = 0.0;
    if (target > 0) {
      cand = detail::bisect_largest([&](double x) { return omega(x * sqrt_d) <= target; }, prev);
    }
    bool floored = false;
    if (!(cand > 0) || cand < floor_value) {
      if (floor_value > 0) {
        cand = floor_value * std::ldexp(1.0, -idx);  // keep a strictly decreasing ladder
        floored = true;
      } else {
        throw std::runtime_error("select_delta: bisection failed (modulus too flat)");
      }
    }
    double dv = std::min(cand, prev);
    if (dv >= prev) dv = prev * 0.5;
    if (!(dv > 0)) throw std::runtime_error("select_delta: underflow in delta selection");
    out.delta.push_back(dv);
    out.floored[static_cast<std::size_t>(idx - 1)] = floored;
    out.any_floored = out.any_floored || floored;
    prev = dv;
  }
  return out;
}

inline DeltaSelection select_delta(const Modulus& omega, const CModel& model, int count,
                                   double floor_value = 0.0) {
  return select_delta(
      omega, [&model](double p, int nu) { return model(p, nu); }, model.d, count, floor_value);
}

}  // namespace multihomeo
