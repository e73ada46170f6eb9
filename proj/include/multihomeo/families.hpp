#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "multihomeo/modulus.hpp"
#include "multihomeo/rng.hpp"

namespace multihomeo {

/// sum_{k<terms} a^k cos(b^k t), with a*b >= 1.  Sup bound 1/(1-a); Holder
/// exponent log(1/a)/log(b) with the geometric-series constant
/// C = a*b/(a*b-1) + 2/(1-a).
struct WeierstrassParams {
  double a = 0.5;
  double b = 4.0;
  int terms = 30;
};

inline double weierstrass_value(const WeierstrassParams& w, double t) {
  double acc = 0, ak = 1, bk = 1;
  for (int k = 0; k < w.terms; ++k) {
    acc += ak * std::cos(bk * t);
    ak *= w.a;
    bk *= w.b;
  }
  return acc;
}

inline double weierstrass_holder_exponent(const WeierstrassParams& w) {
  return std::log(1.0 / w.a) / std::log(w.b);
}

inline double weierstrass_holder_constant(const WeierstrassParams& w) {
  double ab = w.a * w.b;
  return ab / (ab - 1.0) + 2.0 / (1.0 - w.a);
}

namespace detail {

/// Coordinate-average lift of a 1-d profile to R^d: the modulus is preserved
/// because each coordinate moves by at most |x - y|.
inline std::function<double(std::span<const double>)> lift_average(
    std::function<double(double)> f) {
  return [f = std::move(f)](std::span<const double> x) {
    double acc = 0;
    for (double xi : x) acc += f(xi);
    return acc / static_cast<double>(x.size());
  };
}

}  // namespace detail

inline FamilyMember weierstrass_member(const WeierstrassParams& w, std::string name = "weierstrass") {
  double alpha = weierstrass_holder_exponent(w);
  double C = weierstrass_holder_constant(w);
  double sup = 1.0 / (1.0 - w.a);
  FamilyMember m;
  m.name = std::move(name);
  m.eval = detail::lift_average([w](double t) { return weierstrass_value(w, t); });
  m.modulus = Modulus::holder(C, alpha, 2.0 * sup);
  m.sup_bound = sup;
  return m;
}

inline FamilyMember lipschitz_member(double L, std::string name = "lipschitz") {
  FamilyMember m;
  m.name = std::move(name);
  m.eval = detail::lift_average([L](double t) { return std::cos(L * t); });
  m.modulus = Modulus::lipschitz(L, 2.0);
  m.sup_bound = 1.0;
  return m;
}

inline FamilyMember holder_member(double alpha, std::string name = "holder") {
  // |t|^alpha folded to a bounded periodic profile: min over the 2*pi lattice
  // keeps the same Holder constant.
  FamilyMember m;
  m.name = std::move(name);
  m.eval = detail::lift_average([alpha](double t) {
    double u = std::remainder(t, 2.0 * std::numbers::pi);
    return std::pow(std::abs(u), alpha);
  });
  m.modulus = Modulus::holder(1.0, alpha, 2.0 * std::pow(std::numbers::pi, alpha));
  m.sup_bound = std::pow(std::numbers::pi, alpha);
  return m;
}

inline FamilyMember constant_member(double c, std::string name = "const") {
  FamilyMember m;
  m.name = std::move(name);
  m.eval = [c](std::span<const double>) { return c; };
  m.modulus = Modulus::zero();
  m.sup_bound = std::abs(c);
  return m;
}

/// sin(|x|^2 / 2): uniformly equicontinuous on every ball but not globally;
/// the gradient grows like |x|, so shell j carries Lipschitz constant j + 2.
inline FamilyMember chirp_member(std::string name = "chirp") {
  FamilyMember m;
  m.name = std::move(name);
  m.eval = [](std::span<const double> x) {
    double r2 = 0;
    for (double xi : x) r2 += xi * xi;
    return std::sin(0.5 * r2);
  };
  m.modulus = Modulus([](double) { return 2.0; }, Modulus::Source::analytic, "osc-cap");
  m.shell_modulus = [](int j) {
    return Modulus::lipschitz(static_cast<double>(j) + 2.0, 2.0);
  };
  m.sup_bound = 1.0;
  m.globally_uniform = false;
  return m;
}

/// Random trigonometric polynomial sum c_k cos(k t + phase_k), |c_k| <= 1/K.
inline FamilyMember random_trig_member(int max_freq, std::uint64_t seed,
                                       std::string name = "random-trig") {
  Rng rng(seed);
  std::vector<double> c(static_cast<std::size_t>(max_freq) + 1);
  std::vector<double> phase(c.size());
  double lip = 0, sup = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = rng.uniform(-1.0, 1.0) / static_cast<double>(max_freq);
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    lip += std::abs(c[k]) * static_cast<double>(k);
    sup += std::abs(c[k]);
  }
  FamilyMember m;
  m.name = std::move(name);
  m.eval = detail::lift_average([c, phase](double t) {
    double acc = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      acc += c[k] * std::cos(static_cast<double>(k) * t + phase[k]);
    return acc;
  });
  m.modulus = Modulus::lipschitz(lip, 2.0 * sup);
  m.sup_bound = sup;
  return m;
}

/// The three-member family used by the radial-map test suites.
inline FunctionFamily weierstrass_family() {
  std::vector<FamilyMember> members;
  members.push_back(weierstrass_member({0.5, 4.0, 30}, "weierstrass-1/2-4"));
  members.push_back(weierstrass_member({0.5, 8.0, 22}, "weierstrass-1/2-8"));
  members.push_back(weierstrass_member({0.25, 16.0, 16}, "weierstrass-1/4-16"));
  return FunctionFamily(std::move(members));
}

}  // namespace multihomeo
