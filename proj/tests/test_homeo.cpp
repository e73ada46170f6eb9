#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "multihomeo/families.hpp"
#include "multihomeo/net_homeo.hpp"
#include "multihomeo/radial_homeo.hpp"

using namespace multihomeo;

namespace {

std::vector<double> ladder_b(int count) {
  std::vector<double> b(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) b[static_cast<std::size_t>(j)] = std::ldexp(1.0, -j - 1);
  return b;
}

}  // namespace

TEST_CASE("radial profile breakpoints for the ladder sequence") {
  RadialHomeo psi = RadialHomeo::from_b(ladder_b(8));
  CHECK(psi.r(0) == 0.0);
  CHECK(psi.a(1) == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(psi.r(1) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(psi.a(2) == doctest::Approx(1.0 / 32).epsilon(1e-15));
  CHECK(psi.r(2) == doctest::Approx(44.0).epsilon(1e-15));
  // g hits integers at the breakpoints
  for (int j = 0; j < 7; ++j) CHECK(psi.g(psi.r(j)) == doctest::Approx(static_cast<double>(j)));
  // strictly increasing, inverse consistent
  double prev = -1;
  for (double t = 0; t < psi.r(5); t += 0.37) {
    double v = psi.g(t);
    CHECK(v > prev);
    CHECK(psi.g_inverse(v) == doctest::Approx(t).epsilon(1e-12));
    prev = v;
  }
}

TEST_CASE("radial evaluation") {
  RadialHomeo psi = RadialHomeo::from_b(ladder_b(8));
  std::vector<double> zero{0.0, 0.0};
  auto pz = psi.eval(std::span<const double>(zero));
  CHECK(pz[0] == 0.0);
  CHECK(pz[1] == 0.0);

  std::vector<double> x{12.0, 0.0};
  auto px = psi.eval(std::span<const double>(x));
  CHECK(px[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(px[1] == 0.0);

  // linear with slope a_1 inside the first shell
  for (double t : {0.25, 1.0, 5.0, 11.5}) {
    CHECK(psi.eval1(t) == doctest::Approx(psi.a(1) * t).epsilon(1e-14));
    CHECK(psi.eval1(-t) == doctest::Approx(-psi.a(1) * t).epsilon(1e-14));
  }

  // direction preserved, norm equals g(|x|)
  std::vector<double> v{3.0, -4.0};
  auto pv = psi.eval(std::span<const double>(v));
  double norm = std::hypot(pv[0], pv[1]);
  CHECK(norm == doctest::Approx(psi.g(5.0)).epsilon(1e-14));
  CHECK(pv[0] / norm == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
  CHECK(pv[1] / norm == doctest::Approx(-4.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("per-shell Lipschitz bound") {
  RadialHomeo psi = RadialHomeo::from_b(ladder_b(10));
  // shell 0 is exactly linear with slope a_1
  double r0 = radial_lipschitz_max_ratio(psi, 0, 2, 2000, 11);
  CHECK(r0 == doctest::Approx(psi.a(1)).epsilon(1e-12));
  CHECK(r0 <= psi.b()[0]);
  for (int j = 1; j < 8; ++j) {
    double ratio = radial_lipschitz_max_ratio(psi, j, 2, 4000, 11);
    CHECK(ratio <= psi.b()[static_cast<std::size_t>(j)]);
    CHECK(ratio > 0);
  }
}

TEST_CASE("composition bound on a sampled grid") {
  FunctionFamily fam({chirp_member()});
  auto shell = [&fam](int j) { return fam.shell_modulus(j); };
  RadialHomeo psi = RadialHomeo::build(shell, 16);
  // 1-d grid covering several shells
  double R = std::min(32.0, psi.r(8));
  int n = 1 << 14;
  std::vector<double> samples(static_cast<std::size_t>(n) + 1);
  double spacing = 2.0 * R / n;
  const auto& member = fam.members()[0];
  for (int i = 0; i <= n; ++i) {
    double x = -R + spacing * i;
    double y = psi.eval1(x);
    samples[static_cast<std::size_t>(i)] = member.eval(std::span<const double>(&y, 1));
  }
  for (int k = 1; k <= 6; ++k) {
    double delta = std::ldexp(1.0, -k);
    double lhs = estimate_modulus(std::span<const double>(samples), spacing, delta).value;
    double rhs = composed_modulus_bound(psi, shell, delta);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("radial constructor contracts") {
  CHECK_THROWS(RadialHomeo::from_b({0.5}));
  CHECK_THROWS(RadialHomeo::from_b({0.5, 0.5}));
  CHECK_THROWS(RadialHomeo::from_b({0.5, 1.5}));
  CHECK_THROWS(RadialHomeo::from_b({0.25, 0.5}));
}

TEST_CASE("identity map when both nets coincide") {
  auto phi = NetHomeo(Net::alpha(), Net::alpha(), 10, 0.0);
  for (double x : {0.3, 1.0, 1.5, -2.75, 100.25, -0.001953125}) {
    CHECK(phi(x) == doctest::Approx(x).epsilon(1e-12));
  }
  // endpoints are exact
  CHECK(phi(1.0) == 1.0);
  CHECK(phi(-2.0) == -2.0);
  CHECK(phi(1.25) == 1.25);  // rank-2 endpoint of (1,2)
}

TEST_CASE("rank-1 endpoint images follow the target grid") {
  double d1 = 0.125;
  auto phi = NetHomeo(Net::alpha(), Net::beta({d1, d1 / 2, d1 / 4, d1 / 8}), 8, 0.0);
  // boundary of I_0 and I_1 at x = 1 maps to 1 * delta_1
  auto r = phi.eval_detail(1.0);
  CHECK(r.exact_endpoint);
  CHECK(r.value == 1.0 * d1);
  CHECK(phi(2.0) == 2.0 * d1);
  CHECK(phi(4.0) == 3.0 * d1);
  CHECK(phi(-1.0) == 0.0 * d1);
  CHECK(phi(-2.0) == -1.0 * d1);
}

TEST_CASE("matched cells nest, stay within the delta bound, and tile") {
  std::vector<double> delta{0.5, 0.21, 0.081, 0.03, 0.0099};
  for (bool jitter : {false, true}) {
    auto phi = NetHomeo(Net::alpha(), Net::beta(delta, BetaOptions{jitter, 321}), 8, 0.0);
    for (std::int64_t k : {-2, 0, 1}) {
      NetAddress addr{k};
      auto cell = phi.root_cell(k);
      CHECK(cell.hi - cell.lo <= delta[0] * (1 + 1e-12));
      for (int rank = 1; rank < 5; ++rank) {
        // children tile the parent: consecutive shared boundaries
        double prev_hi = phi.child_cell(cell, rank, -6).lo;
        for (std::int64_t s = -6; s <= 6; ++s) {
          auto c = phi.child_cell(cell, rank, s);
          CHECK(c.lo == prev_hi);
          CHECK(c.hi > c.lo);
          CHECK(c.hi - c.lo <= delta[static_cast<std::size_t>(rank)] * (1 + 1e-12));
          CHECK(c.lo >= cell.lo);
          CHECK(c.hi <= cell.hi);
          prev_hi = c.hi;
        }
        std::int64_t pick = (rank % 2 == 0) ? -3 : 2;
        cell = phi.child_cell(cell, rank, pick);
        addr = addr.child(pick);
        // matched cell by address agrees with stepwise descent
        auto via_addr = phi.target_cell(addr);
        CHECK(via_addr.lo == cell.lo);
        CHECK(via_addr.hi == cell.hi);
      }
    }
  }
}

TEST_CASE("endpoint images are exact through the matched tree") {
  std::vector<double> delta{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  auto phi = NetHomeo(Net::alpha(), Net::beta(delta), 7, 0.0);
  Net alpha = Net::alpha();
  // walk a window of addresses; check phi at both endpoints of each interval
  std::vector<NetAddress> frontier{NetAddress{0}, NetAddress{1}, NetAddress{-1}};
  for (int rank = 1; rank <= 4; ++rank) {
    std::vector<NetAddress> next;
    for (const auto& addr : frontier) {
      Interval src = alpha.interval_at(addr);
      auto cell = phi.target_cell(addr);
      auto rl = phi.eval_detail(src.lo_double());
      auto rh = phi.eval_detail(src.hi_double());
      CHECK(rl.exact_endpoint);
      CHECK(rh.exact_endpoint);
      CHECK(rl.value == cell.lo);
      CHECK(rh.value == cell.hi);
      if (rank < 4)
        for (std::int64_t s = -4; s <= 4; ++s) next.push_back(addr.child(s));
    }
    frontier = std::move(next);
  }
}

TEST_CASE("strict monotonicity over sorted samples") {
  std::vector<double> delta{0.3, 0.12, 0.05, 0.02};
  for (bool jitter : {false, true}) {
    auto phi = NetHomeo(Net::alpha(), Net::beta(delta, BetaOptions{jitter, 7}), 10, 0x1.0p-16);
    Rng rng(17);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = rng.uniform(-20.0, 20.0);
    std::sort(xs.begin(), xs.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
      double v = phi(x);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("round trip within source interval length") {
  std::vector<double> delta{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  auto phi = NetHomeo(Net::alpha(), Net::beta(delta, BetaOptions{true, 5}), 6, 0.0);
  Net alpha = Net::alpha();
  Rng rng(23);
  for (int i = 0; i < 400; ++i) {
    double x = rng.uniform(-8.0, 8.0);
    auto fwd = phi.eval_detail(x);
    double back = phi.inverse(fwd.value);
    // allowed error: the rank-6 source interval containing x
    auto loc = alpha.locate(x, 6);
    double len = loc.on_endpoint ? 0.0
                                 : alpha.interval_at(loc.address).length().to_double();
    CHECK(std::abs(back - x) <= std::max(len, 1e-12));
  }
}

TEST_CASE("inverse maps target endpoints to source endpoints") {
  double d1 = 0.25;
  auto phi = NetHomeo(Net::alpha(), Net::beta({d1, d1 / 3, d1 / 9}), 6, 0.0);
  CHECK(phi.inverse(0.0) == -1.0);
  CHECK(phi.inverse(d1) == 1.0);
  CHECK(phi.inverse(2 * d1) == 2.0);
  CHECK(phi.inverse(-d1) == -2.0);
  auto det = phi.inverse_detail(d1);
  CHECK(det.exact_endpoint);
}

TEST_CASE("coordinate lift") {
  auto phi = std::make_shared<const NetHomeo>(Net::alpha(), Net::alpha(), 8, 0.0);
  CoordinateHomeo h(phi, 2);
  std::vector<double> t{0.4, 0.4};
  auto ht = h.eval(std::span<const double>(t));
  CHECK(ht[0] == ht[1]);  // symmetry on the diagonal
  CHECK(ht[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS(CoordinateHomeo(nullptr, 2));
  std::vector<double> bad{1.0};
  CHECK_THROWS(h.eval(std::span<const double>(bad)));
}

TEST_CASE("coordinate map sends rank-nu boxes into small target boxes") {
  std::vector<double> delta{0.4, 0.15, 0.06, 0.021};
  auto phi = std::make_shared<const NetHomeo>(Net::alpha(), Net::beta(delta), 8, 0.0);
  int d = 2;
  for (int rank = 1; rank <= 4; ++rank) {
    std::vector<IndexRange> w(static_cast<std::size_t>(rank), IndexRange{-2, 2});
    for (const auto& rect : product_rectangles(Net::alpha(), d, rank, w)) {
      double max_edge = 0, diam2 = 0;
      for (int ax = 0; ax < d; ++ax) {
        auto cell = phi->target_cell(rect.addresses[static_cast<std::size_t>(ax)]);
        double edge = cell.hi - cell.lo;
        max_edge = std::max(max_edge, edge);
        diam2 += edge * edge;
      }
      double dv = delta[static_cast<std::size_t>(rank - 1)];
      CHECK(max_edge <= dv * (1 + 1e-12));
      CHECK(std::sqrt(diam2) <= dv * std::sqrt(2.0) * (1 + 1e-12));
    }
  }
}

TEST_CASE("torus adaptation endpoints and affine reparametrization") {
  // closed-form control: phi(x) = 2x has l(t) = t/2 and phi_1 = identity
  TorusHomeo doubled([](double u) { return 2.0 * u; }, 0.0, std::numbers::pi);
  CHECK(doubled.l_scale() == doctest::Approx(0.5));
  for (double t : {0.3, 2.0, 6.0}) CHECK(doubled(t) == doctest::Approx(t).epsilon(1e-14));
  CHECK(doubled(0.0) == 0.0);

  // identity phi: l = identity
  auto idphi = std::make_shared<const NetHomeo>(Net::alpha(), Net::alpha(), 10, 0.0);
  TorusHomeo t1 = torus_adapt(idphi);
  CHECK(t1.l_offset() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(t1.l_scale() == doctest::Approx(1.0).epsilon(1e-9));

  // generic net map: endpoints are pinned exactly, defects are reported
  std::vector<double> delta{0.8, 0.33, 0.13, 0.05, 0.019};
  auto phi = std::make_shared<const NetHomeo>(Net::alpha(), Net::beta(delta, BetaOptions{true, 13}),
                                              10, 0x1.0p-20);
  TorusHomeo t2 = torus_adapt(phi);
  CHECK(t2(0.0) == 0.0);
  CHECK(t2(TorusHomeo::period()) == TorusHomeo::period());
  CHECK(t2.left_defect() == 0.0);  // 0 is a target grid point, preimage exact
  CHECK(t2.right_defect() <= 0x1.0p-18);
  double prev = -1;
  for (double t = 0.05; t < TorusHomeo::period(); t += 0.05) {
    double v = t2(t);
    CHECK(v > prev);
    CHECK(v >= 0.0);
    CHECK(v <= TorusHomeo::period());
    prev = v;
  }
}

TEST_CASE("jittered matched tree is not affine across child triples") {
  std::vector<double> delta{0.5, 0.23, 0.11, 0.05};
  auto phi = NetHomeo(Net::alpha(), Net::beta(delta, BetaOptions{true, 77}), 8, 0.0);
  Net alpha = Net::alpha();
  int nonlinear = 0, total = 0;
  for (std::int64_t k : {-1, 0, 1, 2}) {
    for (std::int64_t s : {-2, -1, 0, 1, 2}) {
      NetAddress addr = NetAddress{k}.child(s);
      Interval src = alpha.interval_at(addr);
      // three source points: endpoints and an interior rank-3 boundary
      Interval mid_child = alpha.interval_at(addr.child(0));
      double x0 = src.lo_double(), x1 = mid_child.lo_double(), x2 = src.hi_double();
      double y0 = phi(x0), y1 = phi(x1), y2 = phi(x2);
      double slope_a = (y1 - y0) / (x1 - x0);
      double slope_b = (y2 - y1) / (x2 - x1);
      ++total;
      if (std::abs(slope_a - slope_b) > 1e-6 * std::max(slope_a, slope_b)) ++nonlinear;
    }
  }
  CHECK(nonlinear >= total - 2);  // statistical check, not a proof
}
