#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "multihomeo/dyadic.hpp"
#include "multihomeo/rng.hpp"

using multihomeo::Dyadic;
using multihomeo::Rng;

TEST_CASE("construction and double round-trip") {
  CHECK(Dyadic().is_zero());
  CHECK(Dyadic::from_int(0).is_zero());
  CHECK(Dyadic::from_int(5).to_double() == 5.0);
  CHECK(Dyadic::from_int(-7).to_double() == -7.0);
  CHECK(Dyadic::pow2(-3).to_double() == 0.125);
  CHECK(Dyadic::pow2(10).to_double() == 1024.0);

  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.next_u64() % 120) - 60);
    CHECK(Dyadic::from_double(x).to_double() == x);
  }
}

TEST_CASE("arithmetic agrees with long double on small operands") {
  Rng rng(7);
  for (int i = 0; i < 4000; ++i) {
    auto a = static_cast<std::int64_t>(rng.next_u64() % 2000001) - 1000000;
    auto b = static_cast<std::int64_t>(rng.next_u64() % 2000001) - 1000000;
    int ea = static_cast<int>(rng.next_u64() % 13) - 6;
    int eb = static_cast<int>(rng.next_u64() % 13) - 6;
    Dyadic da = Dyadic::from_int(a).ldexp(ea);
    Dyadic db = Dyadic::from_int(b).ldexp(eb);
    long double la = std::ldexp(static_cast<long double>(a), ea);
    long double lb = std::ldexp(static_cast<long double>(b), eb);
    CHECK((da + db).to_double() == static_cast<double>(la + lb));
    CHECK((da - db).to_double() == static_cast<double>(la - lb));
    CHECK((da * db).to_double() == doctest::Approx(static_cast<double>(la * lb)).epsilon(1e-15));
    int cmp = da.compare(db);
    int ref = la < lb ? -1 : (la > lb ? 1 : 0);
    CHECK(cmp == ref);
  }
}

TEST_CASE("exactness beyond 64-bit mantissas") {
  // (2^100 + 1) - 2^100 == 1
  Dyadic big = Dyadic::pow2(100);
  Dyadic one = Dyadic::from_int(1);
  CHECK((big + one) - big == one);
  // telescoping sum of tiny powers cancels exactly
  Dyadic acc;
  for (int k = 0; k < 300; ++k) acc = acc + Dyadic::pow2(-k);
  for (int k = 0; k < 300; ++k) acc = acc - Dyadic::pow2(-k);
  CHECK(acc.is_zero());
  // associativity across widely separated scales
  Dyadic x = (Dyadic::pow2(90) + Dyadic::pow2(-90)) + Dyadic::pow2(0);
  Dyadic y = Dyadic::pow2(90) + (Dyadic::pow2(-90) + Dyadic::pow2(0));
  CHECK(x == y);
}

TEST_CASE("pow2 predicates and floor_log2") {
  CHECK(Dyadic::pow2(5).is_pow2());
  CHECK((-Dyadic::pow2(5)).is_pow2());
  CHECK(!Dyadic::from_int(3).is_pow2());
  CHECK(Dyadic::from_int(3).floor_log2() == 1);
  CHECK(Dyadic::from_int(4).floor_log2() == 2);
  CHECK(Dyadic::from_double(0.375).floor_log2() == -2);
  CHECK(Dyadic::from_double(-0.375).floor_log2() == -2);
  CHECK_THROWS(Dyadic().floor_log2());
}

TEST_CASE("midpoint is exact") {
  Dyadic a = Dyadic::from_double(1.25);
  Dyadic b = Dyadic::from_double(1.75);
  CHECK(Dyadic::midpoint(a, b).to_double() == 1.5);
  Dyadic c = Dyadic::pow2(-200);
  Dyadic m = Dyadic::midpoint(Dyadic(), c);
  CHECK(m == Dyadic::pow2(-201));
}

TEST_CASE("multiplication exactness") {
  // (2^60 + 1)(2^60 - 1) = 2^120 - 1
  Dyadic p = Dyadic::pow2(60) + Dyadic::from_int(1);
  Dyadic q = Dyadic::pow2(60) - Dyadic::from_int(1);
  CHECK(p * q == Dyadic::pow2(120) - Dyadic::from_int(1));
  CHECK((Dyadic::from_int(3) * Dyadic::pow2(-2)).to_double() == 0.75);
}

TEST_CASE("to_double saturates far outside double range") {
  CHECK(Dyadic::pow2(5000).to_double() == std::numeric_limits<double>::infinity());
  CHECK((-Dyadic::pow2(5000)).to_double() == -std::numeric_limits<double>::infinity());
  CHECK(Dyadic::pow2(-5000).to_double() == 0.0);
  CHECK(std::signbit((-Dyadic::pow2(-5000)).to_double()));
  // comparisons stay exact out there
  CHECK(Dyadic::pow2(5000) < Dyadic::pow2(5001));
  CHECK(Dyadic::pow2(5000) + Dyadic::from_int(1) > Dyadic::pow2(5000));
}

TEST_CASE("string form") {
  CHECK(Dyadic().to_string() == "0");
  CHECK(Dyadic::from_int(3).to_string() == "0x3p0");
  CHECK(Dyadic::pow2(-2).to_string() == "0x1p-2");
}
