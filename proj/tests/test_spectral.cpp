#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "multihomeo/families.hpp"
#include "multihomeo/spectral.hpp"

using namespace multihomeo;
using cplx = std::complex<double>;

namespace {

GridSignal random_signal(const GridDomain& dom, std::uint64_t seed) {
  Rng rng(seed);
  GridSignal f(dom);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.gaussian_complex();
  return f;
}

GridSignal pure_tone(const GridDomain& dom, std::int64_t k) {
  return GridSignal::from_function(dom, [&](std::span<const double> t) {
    return std::exp(cplx(0, static_cast<double>(k) * t[0]));
  });
}

}  // namespace

TEST_CASE("analyze/synthesize round trip and tone coefficients") {
  GridDomain dom = GridDomain::torus(1, 256);
  GridSignal f = random_signal(dom, 3);
  GridSignal back = synthesize(analyze(f), dom);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-12);

  // cos(3t) has coefficients 1/2 at +-3
  GridSignal c3 = GridSignal::from_function(dom, [](std::span<const double> t) {
    return cplx(std::cos(3 * t[0]), 0);
  });
  Spectrum s = analyze(c3);
  CHECK(std::abs(s.at1(3) - cplx(0.5, 0)) < 1e-12);
  CHECK(std::abs(s.at1(-3) - cplx(0.5, 0)) < 1e-12);
  CHECK(std::abs(s.at1(2)) < 1e-12);

  // 2-d round trip
  GridDomain dom2 = GridDomain::torus(2, 32);
  GridSignal f2 = random_signal(dom2, 4);
  GridSignal back2 = synthesize(analyze(f2), dom2);
  for (std::size_t i = 0; i < f2.size(); ++i) CHECK(std::abs(back2[i] - f2[i]) < 1e-12);
}

TEST_CASE("three-dimensional transforms and projections") {
  GridDomain dom = GridDomain::torus(3, 8);
  GridSignal f = random_signal(dom, 44);
  GridSignal back = synthesize(analyze(f), dom);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-12);

  // project onto a corner box and check idempotence
  FreqRect corner{{-4, -4, -4}, {0, 0, 0}};
  GridSignal a = project(f, corner);
  GridSignal b = project(a, corner);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-11);

  // 3-d product partition covers the band
  FrequencyPartition p3 = product_partition(dyadic_frequency_partition(8), 3);
  p3.validate();
  CHECK(square_function(f, p3).l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-8));
}

TEST_CASE("projection basics") {
  GridDomain dom = GridDomain::torus(1, 128);
  GridSignal f = random_signal(dom, 9);

  // full band: unchanged
  GridSignal pf = project(f, FreqRect::line(-64, 64));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(pf[i] - f[i]) < 1e-12);

  // pure tone outside the rectangle: zero
  GridSignal tone = pure_tone(dom, 11);
  GridSignal cut = project(tone, FreqRect::line(-8, 8));
  CHECK(cut.sup_norm() < 1e-12);

  // idempotence on random input
  GridSignal once = project(f, FreqRect::line(-20, 5));
  GridSignal twice = project(once, FreqRect::line(-20, 5));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(twice[i] - once[i]) < 1e-10);

  // orthogonality: disjoint rectangles annihilate
  GridSignal a = project(f, FreqRect::line(0, 8));
  GridSignal b = project(a, FreqRect::line(8, 16));
  CHECK(b.sup_norm() < 1e-11);

  CHECK_THROWS(project(f, FreqRect::line(-128, 4)));
}

TEST_CASE("square function identities") {
  GridDomain dom = GridDomain::torus(1, 256);
  GridSignal f = random_signal(dom, 21);

  // single-cell partition: square function is |f|
  FrequencyPartition full = full_band_partition(1, 256);
  GridSignal sf = square_function(f, full);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(sf[i].real() == doctest::Approx(std::abs(f[i])).epsilon(1e-10));

  // f supported in one cell of the dyadic partition: square function is |f|
  FrequencyPartition dy = dyadic_frequency_partition(256);
  GridSignal band = project(f, FreqRect::line(16, 32));
  GridSignal sb = square_function(band, dy);
  for (std::size_t i = 0; i < band.size(); ++i)
    CHECK(sb[i].real() == doctest::Approx(std::abs(band[i])).epsilon(1e-9));

  // Parseval: ||S f||_2 = ||f||_2
  CHECK(square_function(f, dy).l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-8));

  // pointwise nonnegative
  for (std::size_t i = 0; i < sf.size(); ++i) CHECK(sf[i].real() >= 0.0);
}

TEST_CASE("dyadic frequency partition covers the band") {
  for (int n : {16, 64, 256}) {
    FrequencyPartition p = dyadic_frequency_partition(n);
    p.validate();
    CHECK(p.total_cells() == n);
  }
  FrequencyPartition p2 = product_partition(dyadic_frequency_partition(16), 2);
  p2.validate();
  CHECK(p2.total_cells() == 16 * 16);
}

TEST_CASE("refinement keeps the partition property") {
  // worked example: refining [0, 8).  Continuum children of (0, 8) floored:
  // (0.5, 1) -> [0,1), (1, 2) -> [1,2), middle (2, 6) -> [2,6),
  // (6, 7) -> [6,7), unresolvable right tail -> [7,8).
  auto kids = detail::refine_cell_dyadic(0, 8);
  REQUIRE(kids.size() == 5);
  CHECK(kids[0].lo[0] == 0);
  CHECK(kids[0].hi[0] == 1);
  CHECK(kids[1].lo[0] == 1);
  CHECK(kids[1].hi[0] == 2);
  CHECK(kids[2].lo[0] == 2);
  CHECK(kids[2].hi[0] == 6);
  CHECK(kids[3].lo[0] == 6);
  CHECK(kids[3].hi[0] == 7);
  CHECK(kids[4].lo[0] == 7);
  CHECK(kids[4].hi[0] == 8);

  // short cells are kept whole
  auto tiny = detail::refine_cell_dyadic(3, 4);
  REQUIRE(tiny.size() == 1);
  CHECK(tiny[0].lo[0] == 3);
  CHECK(tiny[0].hi[0] == 4);

  for (int n : {64, 256, 1024}) {
    FrequencyPartition base = dyadic_frequency_partition(n);
    FrequencyPartition ref = refine_partition_dyadic(base);
    ref.validate();
    CHECK(ref.total_cells() == n);  // frequency count preserved
    FrequencyPartition ref2 = refine_partition_dyadic(ref);
    ref2.validate();
    CHECK(ref2.total_cells() == n);
    CHECK(ref.cells.size() > base.cells.size());
  }
}

TEST_CASE("empirical constants: Parseval pins p = 2") {
  FrequencyPartition dy = dyadic_frequency_partition(256);
  auto c2 = empirical_lp_constants(dy, 2.0, 20, 77);
  CHECK(c2.a_p == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c2.b_p == doctest::Approx(1.0).epsilon(1e-8));

  auto full = empirical_lp_constants(full_band_partition(1, 256), 4.0, 10, 78);
  CHECK(full.a_p == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(full.b_p == doctest::Approx(1.0).epsilon(1e-10));

  auto c4 = empirical_lp_constants(dy, 4.0, 20, 79);
  CHECK(c4.a_p > 0);
  CHECK(c4.b_p >= c4.a_p);
  CHECK(std::isfinite(c4.b_p));
}

TEST_CASE("approximant: constants are reproduced exactly") {
  GridDomain dom = GridDomain::box(1, 256, -16.0, 16.0);
  auto g = [](std::span<const double>) { return cplx(2.5, 0); };
  GridSignal gnu = approximant(g, dom, Net::alpha(), 3);
  for (std::size_t i = 0; i < gnu.size(); ++i) CHECK(gnu[i] == cplx(2.5, 0));
}

TEST_CASE("approximant: sup error bounded by the modulus at rank scale") {
  GridDomain dom = GridDomain::box(1, 512, -8.0, 8.0);
  Net alpha = Net::alpha();
  auto g = [](std::span<const double> t) { return cplx(std::cos(t[0]), 0); };  // Lipschitz 1
  GridSignal gs = GridSignal::from_function(dom, g);
  for (int rank = 1; rank <= 4; ++rank) {
    GridSignal gnu = approximant(g, dom, alpha, rank);
    // each grid point lies in a rank-`rank` cell containing its center;
    // |g - g_nu| <= cell length at that point
    double worst = 0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      double x = dom.coord(static_cast<std::int64_t>(i));
      NetAddress cell = alpha.locate_cell(Dyadic::from_double(x), rank);
      double len = alpha.interval_at(cell).length().to_double();
      double err = std::abs(gs[i] - gnu[i]);
      worst = std::max(worst, err - len);
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("oscillation") {
  GridDomain dom = GridDomain::box(1, 1024, 0.0, 1.0);
  GridSignal constant = GridSignal::from_function(dom, [](std::span<const double>) {
    return cplx(1.25, 0);
  });
  double lo = 0.0, hi = 1.0;
  CHECK(oscillation(constant, std::span<const double>(&lo, 1), std::span<const double>(&hi, 1)) == 0.0);

  GridSignal ramp = GridSignal::from_function(dom, [](std::span<const double> t) {
    return cplx(t[0], 0);
  });
  double osc = oscillation(ramp, std::span<const double>(&lo, 1), std::span<const double>(&hi, 1));
  CHECK(osc == doctest::Approx(1.0 - 2.0 / 1024).epsilon(1e-9));

  // osc over a cell is bounded by the modulus at the cell diameter
  auto member = weierstrass_member({0.5, 4.0, 30});
  GridSignal w = GridSignal::from_function(dom, [&](std::span<const double> t) {
    return cplx(member.eval(t), 0);
  });
  double a = 0.25, b = 0.5;
  double osc_w = oscillation(w, std::span<const double>(&a, 1), std::span<const double>(&b, 1));
  CHECK(osc_w <= member.modulus(b - a));

  double empty_lo = 0.5, empty_hi = 0.5000001;
  CHECK_THROWS(oscillation(w, std::span<const double>(&empty_lo, 1), std::span<const double>(&empty_hi, 1)));
}

TEST_CASE("periodize") {
  int n = 64;
  double period = 2.0 * std::numbers::pi;
  // cube aligned at 0: identity fold
  GridDomain cube = GridDomain::box(1, n, 0.0, period);
  GridSignal ones = GridSignal::from_function(cube, [](std::span<const double>) {
    return cplx(1.0, 0);
  });
  GridSignal folded = periodize(ones);
  CHECK(folded.domain().kind == GridDomain::Kind::torus);
  for (std::size_t i = 0; i < folded.size(); ++i) CHECK(folded[i] == cplx(1.0, 0));

  // half-cube indicator becomes a periodic square wave; sup norm preserved
  GridSignal half = GridSignal::from_function(cube, [&](std::span<const double> t) {
    return cplx(t[0] < period / 2 ? 1.0 : 0.0, 0);
  });
  GridSignal sq = periodize(half);
  CHECK(sq.sup_norm() == half.sup_norm());
  int ones_count = 0;
  for (std::size_t i = 0; i < sq.size(); ++i) ones_count += sq[i].real() > 0.5 ? 1 : 0;
  CHECK(ones_count == n / 2);

  // shifted cube folds by translation
  GridDomain shifted = GridDomain::box(1, n, -period / 2, period / 2);
  GridSignal bump = GridSignal::from_function(shifted, [&](std::span<const double> t) {
    return cplx(std::abs(t[0]) < 0.5 ? 1.0 : 0.0, 0);
  });
  GridSignal fb = periodize(bump);
  // the bump at the cube's center lands at torus coordinate 0 (wrapped)
  CHECK(fb[0].real() == 1.0);

  // support overflow: box longer than one period
  GridDomain wide = GridDomain::box(1, n, 0.0, 2 * period);
  GridSignal wide_sig(wide);
  CHECK_THROWS(periodize(wide_sig));
}
