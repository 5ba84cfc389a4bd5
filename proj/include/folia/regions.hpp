#pragma once

// Ball and slab regions with margin-shrunk membership tests.

#include <variant>

#include "folia/core.hpp"

namespace folia {

struct BallRegion {
  CPoint center;
  double radius = 0.0;

  BallRegion() = default;
  BallRegion(CPoint c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw Error("ball radius must be positive");
  }

  static BallRegion origin(std::size_t n, double r) {
    return BallRegion(CPoint(n), r);
  }
};

// The set r*closure(P) x C: |z_j| <= r for j < n, last coordinate free.
// `truncation` bounds |z_n| for sampling only; it is not part of the region.
struct SlabRegion {
  double polyradius = 0.0;
  double truncation = 10.0;

  SlabRegion() = default;
  SlabRegion(double r, double R) : polyradius(r), truncation(R) {
    if (!(polyradius > 0.0) || !(truncation > 0.0))
      throw Error("slab radii must be positive");
  }
};

inline bool region_contains(const BallRegion& b, const CPoint& p, double margin) {
  if (margin < 0.0) throw Error("negative margin");
  if (margin >= b.radius) throw Error("empty shrunk region");
  return dist(p, b.center) <= b.radius - margin;
}

inline bool region_contains(const SlabRegion& s, const CPoint& p, double margin) {
  if (margin < 0.0) throw Error("negative margin");
  if (margin >= s.polyradius) throw Error("empty shrunk region");
  return base_polyradius(p) <= s.polyradius - margin;
}

using Region = std::variant<BallRegion, SlabRegion>;

inline bool region_contains(const Region& r, const CPoint& p, double margin) {
  return std::visit([&](const auto& v) { return region_contains(v, p, margin); }, r);
}

}  // namespace folia
