#include <catch2/catch_amalgamated.hpp>

#include "folia/mover.hpp"

using namespace folia;

namespace {

ConvexBody small_ball(double x, double y, double r) {
  return ConvexBody::make(BallRegion(CPoint{Complex(x, 0), Complex(y, 0)}, r));
}

}  // namespace

TEST_CASE("empty move spec yields the empty chain", "[mover]") {
  MoveSpec spec;
  spec.protected_ball = BallRegion::origin(2, 0.3);
  auto [chain, report] = lemma_starshaped(spec);
  CHECK(chain.size() == 0);
  CHECK(report.pass);
  CHECK(report.k0_error == 0.0);
}

TEST_CASE("single far ball rides one gated shear", "[mover]") {
  MoveSpec spec;
  spec.protected_ball = BallRegion::origin(2, 0.3);
  spec.pieces.push_back(small_ball(0.8, 0.0, 0.05));
  PieceTarget t;
  t.translation = CPoint{Complex(0, 0), Complex(0.9, 0)};  // tangential
  t.tolerance = 1e-3;
  spec.targets.push_back(t);
  spec.delta = 1e-3;
  spec.seed = 5;
  auto [chain, report] = lemma_starshaped(spec);
  REQUIRE(report.pass);
  CHECK(report.k0_error < 1e-3);
  CHECK(report.piece_errors[0] < 1e-3);

  // Held-out oracle: fresh samples, never seen by the fit.
  Rng rng(991);
  double worst_piece = 0.0, worst_k0 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    CPoint p = rng.ball_point(2, 0.05);
    p.z[0] += Complex(0.8, 0);
    CPoint want = p;
    want.z[1] += Complex(0.9, 0);
    worst_piece = std::max(worst_piece, dist(eval(chain, p), want));
    CPoint q = rng.ball_point(2, 0.3);
    worst_k0 = std::max(worst_k0, dist(eval(chain, q), q));
  }
  CHECK(worst_piece < 1e-3);
  CHECK(worst_k0 < 1e-3);
}

TEST_CASE("colliding targets are rejected", "[mover]") {
  MoveSpec spec;
  spec.protected_ball = BallRegion::origin(2, 0.3);
  spec.pieces.push_back(small_ball(0.8, 0.0, 0.05));
  spec.pieces.push_back(small_ball(0.0, 0.8, 0.05));
  PieceTarget t1, t2;
  t1.translation = CPoint{Complex(0, 0), Complex(0.8, 0)};   // -> (0.8, 0.8)
  t2.translation = CPoint{Complex(0.79, 0), Complex(0, 0)};  // -> (0.79, 0.8)
  spec.targets = {t1, t2};
  CHECK_THROWS_WITH(lemma_starshaped(spec),
                    Catch::Matchers::ContainsSubstring("target images not disjoint"));
}

TEST_CASE("two balls with translations meet the 1e-3 certificate", "[mover]") {
  // The joint-approximation acceptance geometry: radius-0.05 balls at
  // distance >= 0.5, protected ball of radius 0.3, translations of length 0.5.
  MoveSpec spec;
  spec.protected_ball = BallRegion::origin(2, 0.3);
  spec.pieces.push_back(small_ball(0.6, 0.0, 0.05));
  spec.pieces.push_back(small_ball(0.0, 0.6, 0.05));
  PieceTarget t1, t2;
  t1.translation = CPoint{Complex(0, 0), Complex(-0.5, 0)};
  t1.tolerance = 1e-3;
  t2.translation = CPoint{Complex(0.5, 0), Complex(0, 0)};
  t2.tolerance = 1e-3;
  spec.targets = {t1, t2};
  spec.delta = 1e-3;
  spec.seed = 7;
  auto [chain, report] = lemma_starshaped(spec);
  REQUIRE(report.pass);
  CHECK(report.k0_error < 1e-3);
  CHECK(report.piece_errors[0] < 1e-3);
  CHECK(report.piece_errors[1] < 1e-3);
}

TEST_CASE("fiber squeeze then translate", "[mover]") {
  MoveSpec spec;
  spec.protected_ball = BallRegion::origin(2, 0.25);
  spec.pieces.push_back(small_ball(0.75, 0.0, 0.06));
  PieceTarget t;
  t.scale = 0.45;
  t.translation = CPoint{Complex(0, 0), Complex(1.1, 0)};
  t.tolerance = 2e-3;
  spec.targets = {t};
  spec.delta = 2e-3;
  spec.seed = 11;
  auto [chain, report] = lemma_starshaped(spec);
  REQUIRE(report.pass);
  CHECK(report.piece_errors[0] < 2e-3);

  // The fiber through the piece center contracts by the requested factor.
  CPoint a{Complex(0.75, 0), Complex(0.04, 0)};
  CPoint b{Complex(0.75, 0), Complex(-0.04, 0)};
  const double before = dist(a, b);
  const double after = dist(eval(chain, a), eval(chain, b));
  CHECK(after / before == Catch::Approx(0.45).margin(0.02));
}

TEST_CASE("twist with no plates is the identity", "[mover]") {
  AutChain id(2);
  auto [theta, rep] = lemma_main(BallRegion::origin(2, 0.5), {}, id, 2.0, 0.01, 5e-3);
  CHECK(theta.size() == 0);
  CHECK(rep.pass);
  CHECK(rep.identity);
}

TEST_CASE("plate already clear of the slab short-circuits", "[mover]") {
  AutChain id(2);
  Plate pl;
  pl.center = CPoint{Complex(3.6, 0), Complex(0, 0)};
  pl.normal = CPoint{Complex(1, 0), Complex(0, 0)};
  pl.radius = 0.05;
  pl.thickness = 0.02;
  TwistOptions opts;
  opts.slab_samples = 8000;
  opts.seed = 3;
  auto [theta, rep] = lemma_main(BallRegion::origin(2, 0.5), {pl}, id, 0.8, 0.01,
                                 5e-3, opts);
  CHECK(theta.size() == 0);
  CHECK(rep.identity);
  CHECK(rep.min_clearance > 0.08);
}

TEST_CASE("stage-one twist passes its certificates", "[mover]") {
  // Shell (0.5, 0.9), eight axis plates on the mid-sphere, identity chain.
  const Shell shell{1, 0.5, 0.9};
  auto plates = build_labyrinth_shell(shell, 1, 0.025, 2,
                                      PlateLayoutOptions{0.12, 0.03, 1e-4});
  REQUIRE(plates.size() == 8);
  for (auto& pl : plates) REQUIRE(pl.radius < 0.06);

  AutChain id(2);
  TwistOptions opts;
  opts.slab_samples = 20000;
  opts.fit_samples = 500;
  opts.seed = 17;
  auto [theta, rep] =
      lemma_main(BallRegion::origin(2, 0.5), plates, id, 2.0, 0.012, 6e-3, opts);
  REQUIRE(rep.pass);
  CHECK(rep.ball_error < 0.012);
  CHECK(rep.min_clearance > 0.0);
  CHECK(theta.size() >= 6);

  // Theta o Psi is the identity at chain level.
  const AutChain psi = inverse_chain(theta);
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    const CPoint p = rng.ball_point(2, 1.5);
    CHECK(dist(eval(compose(theta, psi), p), p) < 1e-10);
  }
}
