#pragma once

// Labyrinth plates: round balls in affine real hyperplanes of R^{2n},
// thickened to slabs of half-width `thickness`. Projections, support
// functions and signed separation margins are all closed-form or
// alternating-projection based; every downstream certificate leans on them.

#include <vector>

#include "folia/core.hpp"
#include "folia/regions.hpp"

namespace folia {

struct Plate {
  CPoint center;   // point of the affine hyperplane
  CPoint normal;   // unit vector of R^{2n}
  double radius = 0.0;     // in-plane ball radius
  double thickness = 0.0;  // half-width along the normal

  std::size_t dim() const { return center.dim(); }
};

// Orthogonal decomposition of p - center into normal and in-plane parts.
inline void plate_split(const Plate& pl, const CPoint& p, double& a, CPoint& w) {
  CPoint v = p - pl.center;
  a = rdot(v, pl.normal);
  w = v;
  CPoint nu = pl.normal;
  nu *= a;
  w -= nu;
}

inline CPoint plate_project(const Plate& pl, const CPoint& p) {
  double a;
  CPoint w;
  plate_split(pl, p, a, w);
  a = std::clamp(a, -pl.thickness, pl.thickness);
  const double wn = norm(w);
  if (wn > pl.radius && wn > 0.0) w *= pl.radius / wn;
  CPoint out = pl.center;
  CPoint nu = pl.normal;
  nu *= a;
  out += nu;
  out += w;
  return out;
}

inline double plate_distance(const Plate& pl, const CPoint& p) {
  return dist(p, plate_project(pl, p));
}

inline bool plate_contains(const Plate& pl, const CPoint& p, double inflate = 0.0) {
  return plate_distance(pl, p) <= inflate;
}

// Membership in the plate eroded by r (exact for r <= min(thickness, radius)).
inline bool plate_contains_deflated(const Plate& pl, const CPoint& p, double r) {
  double a;
  CPoint w;
  plate_split(pl, p, a, w);
  return std::abs(a) <= pl.thickness - r && norm(w) <= pl.radius - r;
}

// Support function h(d) = max_{x in plate} <x, d> for a unit direction d.
inline double plate_support(const Plate& pl, const CPoint& d) {
  const double dn = rdot(d, pl.normal);
  CPoint dt = d;
  CPoint nu = pl.normal;
  nu *= dn;
  dt -= nu;
  return rdot(pl.center, d) + pl.thickness * std::abs(dn) + pl.radius * norm(dt);
}

inline double plate_min_norm(const Plate& pl) {
  return norm(plate_project(pl, CPoint(pl.dim())));
}

inline double plate_max_norm(const Plate& pl) {
  // max of |x| over the plate is attained on a rim of one of the two faces.
  const double beta0 = rdot(pl.center, pl.normal);
  CPoint q = pl.center;
  CPoint nu = pl.normal;
  nu *= beta0;
  q -= nu;  // in-plane part of the center
  const double qn = norm(q);
  const double bmax = std::max(std::abs(beta0 + pl.thickness), std::abs(beta0 - pl.thickness));
  const double rim = qn + pl.radius;
  return std::sqrt(bmax * bmax + rim * rim);
}

// ---------------------------------------------------------------------------
// Generic convex bodies (balls and plates) with projections and supports;
// signed separation margins via alternating projections plus support gaps.
// ---------------------------------------------------------------------------

struct ConvexBody {
  enum class Kind { Ball, Plate } kind = Kind::Ball;
  BallRegion ball;
  Plate plate;

  static ConvexBody make(const BallRegion& b) {
    ConvexBody c;
    c.kind = Kind::Ball;
    c.ball = b;
    return c;
  }
  static ConvexBody make(const Plate& p) {
    ConvexBody c;
    c.kind = Kind::Plate;
    c.plate = p;
    return c;
  }

  std::size_t dim() const {
    return kind == Kind::Ball ? ball.center.dim() : plate.dim();
  }

  const CPoint& center() const {
    return kind == Kind::Ball ? ball.center : plate.center;
  }

  CPoint project(const CPoint& p) const {
    if (kind == Kind::Plate) return plate_project(plate, p);
    CPoint v = p - ball.center;
    const double vn = norm(v);
    if (vn <= ball.radius) return p;
    v *= ball.radius / vn;
    return ball.center + v;
  }

  double support(const CPoint& d) const {
    if (kind == Kind::Plate) return plate_support(plate, d);
    return rdot(ball.center, d) + ball.radius;
  }
};

// Distance between two convex bodies (0 if they intersect), by alternating
// projections; exact for disjoint closed convex sets.
inline double convex_distance(const ConvexBody& a, const ConvexBody& b,
                              CPoint* pa = nullptr, CPoint* pb = nullptr,
                              int max_iter = 200, double tol = 1e-13) {
  CPoint x = a.project(b.center());
  CPoint y = b.project(x);
  double d = dist(x, y);
  for (int it = 0; it < max_iter; ++it) {
    x = a.project(y);
    y = b.project(x);
    const double nd = dist(x, y);
    if (d - nd < tol) {
      d = nd;
      break;
    }
    d = nd;
  }
  if (pa) *pa = x;
  if (pb) *pb = y;
  return d;
}

// Signed margin: separation distance when disjoint, a negative overlap bound
// when not. Computed as max over candidate directions of the support gap
// <d, anything of B> - <d, anything of A>; the nearest-pair direction makes
// it exact in the disjoint case.
inline double signed_margin(const ConvexBody& a, const ConvexBody& b) {
  CPoint pa, pb;
  const double d = convex_distance(a, b, &pa, &pb);
  if (d > 1e-12) return d;
  const std::size_t n = a.dim();
  std::vector<CPoint> dirs;
  CPoint cl = b.center() - a.center();
  if (norm(cl) > 1e-12) {
    cl *= 1.0 / norm(cl);
    dirs.push_back(cl);
  }
  for (std::size_t i = 0; i < n; ++i) {
    CPoint e(n);
    e.z[i] = Complex(1.0, 0.0);
    dirs.push_back(e);
    CPoint f(n);
    f.z[i] = Complex(0.0, 1.0);
    dirs.push_back(f);
  }
  Rng rng(0x5eedu + 7 * n);
  for (int k = 0; k < 64; ++k) dirs.push_back(rng.sphere_dir(n));
  double best = -1e300;
  for (const auto& dir : dirs) {
    CPoint neg = dir;
    neg *= -1.0;
    const double gap = -b.support(neg) - a.support(dir);
    best = std::max(best, gap);
  }
  return std::min(best, 0.0);
}

}  // namespace folia
