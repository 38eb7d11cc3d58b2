#include <catch2/catch_amalgamated.hpp>

#include <convlab/interval_union.hpp>

using namespace convlab;

TEST_CASE("interval union normalization and measure") {
  auto u = IntervalUnion::from_pairs({{4, 6}, {0, 2}, {1, 3}});
  REQUIRE(u.parts().size() == 2);
  CHECK(u.parts()[0].lo == 0);
  CHECK(u.parts()[0].hi == 3);
  CHECK(u.measure() == 5);
  CHECK(IntervalUnion().empty());
  CHECK_THROWS_AS(IntervalUnion::single(2, 2), validation_error);
}

TEST_CASE("line sumset") {
  auto a = IntervalUnion::single(0, 2);
  CHECK(sumset(a, a).measure() == 4);

  // (0,1) u (2,3) plus (0,0.5) in half-units: measure 6 half-units.
  auto b1 = IntervalUnion::from_pairs({{0, 2}, {4, 6}});
  auto b2 = IntervalUnion::single(0, 1);
  auto s = sumset(b1, b2);
  CHECK(s.measure() == 6);
  REQUIRE(s.parts().size() == 2);
  CHECK(s.parts()[0].hi == 3);
}

TEST_CASE("circular sumset") {
  // Arc wrap: (6,8) + (6,8) mod 10 = (12,16) mod 10 = (2,6).
  auto a = IntervalUnion::single(6, 8);
  auto w = sumset_mod(a, a, 10);
  REQUIRE(w.parts().size() == 1);
  CHECK(w.parts()[0].lo == 2);
  CHECK(w.parts()[0].hi == 6);

  // Saturation: summed length at least the period covers the circle.
  auto big = IntervalUnion::single(0, 7);
  auto full = sumset_mod(big, big, 10);
  CHECK(full.measure() == 10);

  // Straddling wrap point.
  auto c = IntervalUnion::single(8, 11);
  auto s = sumset_mod(c, IntervalUnion::single(0, 1), 10);
  CHECK(s.measure() == 4);
  REQUIRE(s.parts().size() == 2);
}
