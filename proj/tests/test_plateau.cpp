#include <catch2/catch_amalgamated.hpp>

#include "folia/plateau.hpp"

using namespace folia;

namespace {

std::vector<Complex> disc_samples(Complex center, double radius, int count, Rng& rng) {
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double t = rng.uniform(0.0, 2.0 * M_PI);
    out.push_back(center + Complex(r * std::cos(t), r * std::sin(t)));
  }
  // Include the boundary circle, where sup errors live.
  for (int i = 0; i < count / 2; ++i) {
    const double t = 2.0 * M_PI * i / (count / 2);
    out.push_back(center + Complex(radius * std::cos(t), radius * std::sin(t)));
  }
  return out;
}

}  // namespace

TEST_CASE("constant plateau with no off-set", "[plateau]") {
  const auto fit = fit_plateau_poly(std::vector<Complex>{Complex(0, 0)}, {}, 0, 1e-12);
  CHECK(fit.on_error == 0.0);
  CHECK(fit.poly.eval1(Complex(0.3, -0.2)) == Complex(1, 0));
}

TEST_CASE("separated discs admit a 1e-3 plateau", "[plateau]") {
  Rng rng(17);
  const auto on = disc_samples(Complex(0, 0), 0.2, 600, rng);
  const auto off = disc_samples(Complex(2, 0), 0.2, 600, rng);
  const auto fit = fit_plateau_poly(on, off, 30, 1e-3);
  CHECK(fit.on_error < 1e-3);
  CHECK(fit.off_error < 1e-3);

  // Dense held-out oracle: 10^4 fresh samples per disc.
  Rng rng2(18);
  const auto on2 = disc_samples(Complex(0, 0), 0.2, 7000, rng2);
  const auto off2 = disc_samples(Complex(2, 0), 0.2, 7000, rng2);
  double on_err = 0.0, off_err = 0.0;
  for (const auto& u : on2) on_err = std::max(on_err, std::abs(fit.poly.eval1(u) - Complex(1, 0)));
  for (const auto& u : off2) off_err = std::max(off_err, std::abs(fit.poly.eval1(u)));
  CHECK(on_err < 1e-3);
  CHECK(off_err < 1e-3);
}

TEST_CASE("overlapping on/off sets are rejected", "[plateau]") {
  Rng rng(19);
  const auto on = disc_samples(Complex(0, 0), 0.3, 200, rng);
  const auto off = disc_samples(Complex(0.1, 0), 0.3, 200, rng);
  // Contradictory constraints on intersecting sets cannot be met.
  CHECK_THROWS_AS(fit_plateau_poly(on, off, 30, 1e-3), Error);
}

TEST_CASE("inner suppression handles tight radial gaps", "[plateau]") {
  // Off-set: disc of radius 0.88 about 0. On-set: a thin tangential
  // rectangle at radius 0.92 -- the stage geometry of the induction.
  Rng rng(20);
  std::vector<Complex> off = disc_samples(Complex(0, 0), 0.88, 1500, rng);
  std::vector<Complex> on;
  for (int i = 0; i < 800; ++i) {
    const double x = rng.uniform(0.915, 0.935);
    const double y = rng.uniform(-0.25, 0.25);
    on.push_back(Complex(x, y));
  }
  PlateauRequest req;
  req.max_degree = 900;
  req.on_tol = 1e-4;
  req.off_tol = 1e-6;
  const auto fit = fit_plateau_poly(on, off, req);
  CHECK(fit.prefix_power > 50);
  CHECK(fit.on_error < 1e-4);
  CHECK(fit.off_error < 1e-6);

  // Held-out verification on fresh, denser samples.
  Rng rng2(21);
  const auto off2 = disc_samples(Complex(0, 0), 0.88, 6000, rng2);
  double off_err = 0.0, on_err = 0.0;
  for (const auto& u : off2) off_err = std::max(off_err, std::abs(fit.poly.eval1(u)));
  for (int i = 0; i < 4000; ++i) {
    const Complex u(rng2.uniform(0.915, 0.935), rng2.uniform(-0.25, 0.25));
    on_err = std::max(on_err, std::abs(fit.poly.eval1(u) - Complex(1, 0)));
  }
  CHECK(off_err < 2e-6);
  CHECK(on_err < 2e-4);
}

TEST_CASE("infeasible fit raises", "[plateau]") {
  Rng rng(22);
  // Overlapping moduli with a microscopic gap and a absurd tolerance at a
  // tiny degree budget cannot succeed.
  std::vector<Complex> on, off;
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.0, 2.0 * M_PI);
    on.push_back(Complex(0.9001 * std::cos(t), 0.9001 * std::sin(t)));
    off.push_back(Complex(0.9 * std::cos(t + 0.01), 0.9 * std::sin(t + 0.01)));
  }
  CHECK_THROWS_WITH(fit_plateau_poly(on, off, 12, 1e-9),
                    Catch::Matchers::ContainsSubstring("plateau fit failed"));
}

TEST_CASE("multivariate plateau in two variables", "[plateau]") {
  Rng rng(23);
  std::vector<std::vector<Complex>> on, off;
  for (int i = 0; i < 300; ++i) {
    on.push_back({Complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)),
                  Complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1))});
    off.push_back({Complex(2.0 + rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)),
                   Complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1))});
  }
  const auto fit = fit_plateau_poly(on, off, 18, 1e-3);
  CHECK(fit.on_error < 1e-3);
  CHECK(fit.off_error < 1e-3);
}
