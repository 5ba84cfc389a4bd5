#include <catch2/catch_amalgamated.hpp>

#include "folia/labyrinth.hpp"

using namespace folia;

TEST_CASE("shell widths for the dyadic schedule", "[labyrinth]") {
  std::vector<double> rho;
  for (int i = 1; i <= 6; ++i) rho.push_back(1.0 - std::pow(2.0, -i));
  const auto shells = build_shells(rho);
  REQUIRE(shells.size() == 5);
  for (std::size_t i = 0; i < shells.size(); ++i)
    CHECK(shells[i].width() == Catch::Approx(std::pow(2.0, -double(i + 2))));
}

TEST_CASE("single shell from a two-entry schedule", "[labyrinth]") {
  const auto shells = build_shells({0.5, 0.9});
  REQUIRE(shells.size() == 1);
  CHECK(shells[0].rho_in == 0.5);
  CHECK(shells[0].rho_out == 0.9);
}

TEST_CASE("harmonic schedule widths", "[labyrinth]") {
  std::vector<double> rho;
  for (int i = 1; i <= 5; ++i) rho.push_back(1.0 - 1.0 / (i + 1));
  const auto shells = build_shells(rho);
  for (std::size_t k = 0; k < shells.size(); ++k) {
    const double i = double(k + 1);
    CHECK(shells[k].width() == Catch::Approx(1.0 / ((i + 1) * (i + 2))));
  }
}

TEST_CASE("invalid schedules are rejected", "[labyrinth]") {
  CHECK_THROWS_WITH(build_shells({0.9, 0.5}),
                    Catch::Matchers::ContainsSubstring("invalid radius schedule"));
  CHECK_THROWS_WITH(build_shells({0.5, 1.2}),
                    Catch::Matchers::ContainsSubstring("invalid radius schedule"));
  CHECK_THROWS_WITH(build_shells({-0.1, 0.5}),
                    Catch::Matchers::ContainsSubstring("invalid radius schedule"));
}

TEST_CASE("density-1 layer sits on the mid-sphere", "[labyrinth]") {
  const Shell shell{1, 0.5, 0.9};
  const auto plates = build_labyrinth_shell(shell, 1, 0.004, 2);
  REQUIRE(plates.size() == 8);  // the axis orbit of R^4
  for (const auto& pl : plates) {
    CHECK(norm(pl.center) == Catch::Approx(0.7));
    CHECK(plate_min_norm(pl) > shell.rho_in);
    CHECK(plate_max_norm(pl) < shell.rho_out);
    // Tangential orientation: normal parallel to the center direction.
    CPoint dir = pl.center;
    dir *= 1.0 / norm(pl.center);
    CHECK(std::abs(rdot(dir, pl.normal)) == Catch::Approx(1.0));
  }
}

TEST_CASE("density 0 is rejected", "[labyrinth]") {
  CHECK_THROWS(build_labyrinth_shell(Shell{1, 0.5, 0.9}, 0, 0.004, 2));
}

TEST_CASE("density-3 plates are pairwise disjoint with positive margin", "[labyrinth]") {
  const Shell shell{1, 0.5, 0.9};
  const auto plates = build_labyrinth_shell(shell, 3, 0.002, 2);
  REQUIRE(plates.size() == 8 + 16 + 24);
  // Exhaustive pairwise oracle.
  double min_gap = 1e300;
  for (std::size_t i = 0; i < plates.size(); ++i)
    for (std::size_t j = i + 1; j < plates.size(); ++j)
      min_gap = std::min(min_gap, convex_distance(ConvexBody::make(plates[i]),
                                                  ConvexBody::make(plates[j])));
  CHECK(min_gap > 0.0);
}

TEST_CASE("check_disjoint_and_contained flags overlaps", "[labyrinth]") {
  const Shell shell{1, 0.5, 0.9};
  auto plates = build_labyrinth_shell(shell, 1, 0.004, 2);
  const auto inner = BallRegion::origin(2, 0.5);
  CHECK(check_disjoint_and_contained(inner, plates) > 0.0);
  CHECK(shell_containment_margin(shell, plates) > 0.0);

  auto doubled = plates;
  doubled.push_back(plates.front());
  CHECK(check_disjoint_and_contained(inner, doubled) < 0.0);
}

TEST_CASE("margin agrees with the exhaustive pair oracle", "[labyrinth]") {
  const Shell shell{1, 0.5, 0.9};
  const auto plates = build_labyrinth_shell(shell, 2, 0.003, 2);
  const auto inner = BallRegion::origin(2, 0.5);
  const double margin = check_disjoint_and_contained(inner, plates);

  double oracle = 1e300;
  const ConvexBody b0 = ConvexBody::make(inner);
  for (std::size_t i = 0; i < plates.size(); ++i) {
    oracle = std::min(oracle, convex_distance(ConvexBody::make(plates[i]), b0));
    for (std::size_t j = i + 1; j < plates.size(); ++j)
      oracle = std::min(oracle, convex_distance(ConvexBody::make(plates[i]),
                                                ConvexBody::make(plates[j])));
  }
  CHECK(margin == Catch::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("plate support and extents are consistent with dense sampling", "[labyrinth]") {
  const Shell shell{1, 0.5, 0.9};
  const auto plates = build_labyrinth_shell(shell, 1, 0.004, 2);
  const Plate& pl = plates.front();
  Rng rng(99);
  double max_n = 0.0, min_n = 1e300;
  for (int k = 0; k < 20000; ++k) {
    // Rejection-sample points of the plate through its parametrization.
    const double a = rng.uniform(-pl.thickness, pl.thickness);
    CPoint w = rng.ball_point(2, pl.radius);
    const double wn = rdot(w, pl.normal);
    CPoint corr = pl.normal;
    corr *= wn;
    w -= corr;  // in-plane component
    CPoint x = pl.center;
    CPoint nu = pl.normal;
    nu *= a;
    x += nu;
    x += w;
    REQUIRE(plate_contains(pl, x, 1e-9));
    max_n = std::max(max_n, norm(x));
    min_n = std::min(min_n, norm(x));
  }
  CHECK(max_n <= plate_max_norm(pl) + 1e-9);
  CHECK(min_n >= plate_min_norm(pl) - 1e-9);
  CHECK(plate_max_norm(pl) <= max_n + 0.05);
}
