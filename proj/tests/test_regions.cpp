#include <catch2/catch_amalgamated.hpp>

#include "folia/regions.hpp"

using namespace folia;

TEST_CASE("unit ball contains the origin", "[regions]") {
  const auto b = BallRegion::origin(2, 1.0);
  CHECK(region_contains(b, CPoint(2), 0.0));
}

TEST_CASE("boundary point excluded by shrink", "[regions]") {
  const auto b = BallRegion::origin(2, 1.0);
  CPoint p(2);
  p.z[0] = Complex(1.0, 0.0);
  CHECK(region_contains(b, p, 0.0));
  CHECK_FALSE(region_contains(b, p, 0.01));
}

TEST_CASE("slab admits any finite last coordinate", "[regions]") {
  const SlabRegion s(2.0, 10.0);
  CPoint p(2);
  p.z[0] = Complex(1.5, 0.0);
  p.z[1] = Complex(1e6, 0.0);
  CHECK(region_contains(s, p, 0.0));
  p.z[0] = Complex(2.5, 0.0);
  CHECK_FALSE(region_contains(s, p, 0.0));
}

TEST_CASE("empty shrunk region is rejected", "[regions]") {
  const auto b = BallRegion::origin(2, 0.5);
  CHECK_THROWS_WITH(region_contains(b, CPoint(2), 0.5),
                    Catch::Matchers::ContainsSubstring("empty shrunk region"));
}

TEST_CASE("margin monotonicity", "[regions]") {
  const auto b = BallRegion::origin(2, 1.0);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const CPoint p = rng.ball_point(2, 1.2);
    const double m1 = rng.uniform(0.0, 0.9);
    const double m2 = rng.uniform(0.0, m1);
    if (region_contains(b, p, m1)) CHECK(region_contains(b, p, m2));
  }
}
