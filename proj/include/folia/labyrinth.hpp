#pragma once

// Shell-indexed labyrinth construction. Plates sit tangentially on concentric
// mid-spheres of each shell; the angular patterns are orbits of the signed
// coordinate-permutation group, which keeps the whole configuration symmetric
// (the grid oracle exploits that) and the per-layer patterns interleaved.

#include <vector>

#include "folia/core.hpp"
#include "folia/plate.hpp"
#include "folia/regions.hpp"

namespace folia {

struct Shell {
  int index = 1;       // 1-based stage index
  double rho_in = 0.0;
  double rho_out = 0.0;

  double width() const { return rho_out - rho_in; }
};

inline std::vector<Shell> build_shells(const std::vector<double>& rho) {
  if (rho.size() < 2) throw Error("invalid radius schedule");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || !(rho[i] < 1.0)) throw Error("invalid radius schedule");
    if (i > 0 && !(rho[i] > rho[i - 1])) throw Error("invalid radius schedule");
  }
  std::vector<Shell> out;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    out.push_back(Shell{int(i + 1), rho[i], rho[i + 1]});
  return out;
}

namespace detail {

// Direction orbits on the unit sphere of R^m under signed permutations.
inline std::vector<std::vector<double>> axis_directions(std::size_t m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> d(m, 0.0);
      d[i] = s;
      out.push_back(d);
    }
  }
  return out;
}

inline std::vector<std::vector<double>> diagonal_directions(std::size_t m) {
  std::vector<std::vector<double>> out;
  const double c = 1.0 / std::sqrt(double(m));
  for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = (mask >> i & 1) ? -c : c;
    out.push_back(d);
  }
  return out;
}

inline std::vector<std::vector<double>> edge_directions(std::size_t m) {
  std::vector<std::vector<double>> out;
  const double c = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          std::vector<double> d(m, 0.0);
          d[i] = si * c;
          d[j] = sj * c;
          out.push_back(d);
        }
  return out;
}

inline CPoint from_reals(const std::vector<double>& v) {
  CPoint p(v.size() / 2);
  for (std::size_t i = 0; i < p.dim(); ++i)
    p.z[i] = Complex(v[2 * i], v[2 * i + 1]);
  return p;
}

inline double min_pairwise_distance(const std::vector<std::vector<double>>& dirs) {
  double best = 1e300;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dirs[i].size(); ++k) {
        const double d = dirs[i][k] - dirs[j][k];
        s += d * d;
      }
      best = std::min(best, std::sqrt(s));
    }
  return best;
}

}  // namespace detail

struct PlateLayoutOptions {
  double radius_factor = 0.90;      // fraction of the geometric maximum
  double boundary_clearance = 0.0;  // absolute; 0 means 6% of shell width
  double min_margin = 1e-4;         // required pairwise/world margin
};

// Places `density` concentric layers of tangential plates in the shell.
// Layer patterns cycle axis / diagonal / edge orbits so consecutive layers
// are offset in angle. Throws if the resulting plates are not pairwise
// disjoint inside the open shell.
inline std::vector<Plate> build_labyrinth_shell(const Shell& shell, int density,
                                                double thickness, std::size_t n,
                                                const PlateLayoutOptions& opts = {}) {
  if (density < 1) throw Error("density must be at least 1");
  if (!(thickness > 0.0)) throw Error("thickness must be positive");
  const double w = shell.width();
  if (!(thickness < 0.5 * w))
    throw Error("plates overlap; reduce density or thickness");
  const std::size_t m = 2 * n;
  const double clear = opts.boundary_clearance > 0.0 ? opts.boundary_clearance : 0.06 * w;

  std::vector<Plate> plates;
  for (int k = 1; k <= density; ++k) {
    const double s = shell.rho_in + w * double(k) / double(density + 1);
    std::vector<std::vector<double>> dirs;
    switch ((k - 1) % 3) {
      case 0: dirs = detail::axis_directions(m); break;
      case 1: dirs = detail::diagonal_directions(m); break;
      default: dirs = detail::edge_directions(m); break;
    }
    // Outward bulge limit: the rim of a tangential plate of radius R at
    // center radius s reaches sqrt(s^2 + R^2) + thickness.
    const double rim_cap = shell.rho_out - thickness - clear;
    if (rim_cap <= s) throw Error("plates overlap; reduce density or thickness");
    const double r_out = std::sqrt(rim_cap * rim_cap - s * s);
    const double gap = detail::min_pairwise_distance(dirs) * s;
    const double r_nbr = 0.5 * gap;
    const double rp = opts.radius_factor * std::min(r_out, r_nbr);
    if (!(rp > 0.0) || s - thickness <= shell.rho_in + clear)
      throw Error("plates overlap; reduce density or thickness");
    for (const auto& d : dirs) {
      Plate pl;
      pl.normal = detail::from_reals(d);
      pl.center = pl.normal;
      pl.center *= s;
      pl.radius = rp;
      pl.thickness = thickness;
      plates.push_back(pl);
    }
  }

  // Verify the construction: pairwise disjoint, inside the open shell.
  for (std::size_t i = 0; i < plates.size(); ++i) {
    if (plate_min_norm(plates[i]) <= shell.rho_in + opts.min_margin ||
        plate_max_norm(plates[i]) >= shell.rho_out - opts.min_margin)
      throw Error("plates overlap; reduce density or thickness");
    for (std::size_t j = i + 1; j < plates.size(); ++j) {
      if (signed_margin(ConvexBody::make(plates[i]), ConvexBody::make(plates[j])) <=
          opts.min_margin)
        throw Error("plates overlap; reduce density or thickness");
    }
  }
  return plates;
}

// Minimum of pairwise plate margins and plate-to-ball margins. Negative
// values indicate an overlap; callers treat them as a failed check.
inline double check_disjoint_and_contained(const BallRegion& inner,
                                           const std::vector<Plate>& plates) {
  double margin = 1e300;
  const ConvexBody b0 = ConvexBody::make(inner);
  for (std::size_t i = 0; i < plates.size(); ++i) {
    const ConvexBody pi = ConvexBody::make(plates[i]);
    margin = std::min(margin, signed_margin(pi, b0));
    for (std::size_t j = i + 1; j < plates.size(); ++j)
      margin = std::min(margin, signed_margin(pi, ConvexBody::make(plates[j])));
  }
  return margin;
}

// Distance margins of every plate to the shell boundary spheres.
inline double shell_containment_margin(const Shell& shell,
                                       const std::vector<Plate>& plates) {
  double margin = 1e300;
  for (const auto& pl : plates) {
    margin = std::min(margin, plate_min_norm(pl) - shell.rho_in);
    margin = std::min(margin, shell.rho_out - plate_max_norm(pl));
  }
  return margin;
}

struct Labyrinth {
  std::vector<Shell> shells;
  std::vector<std::vector<Plate>> plates;  // plates[i] belongs to shells[i]
  std::vector<double> delta;               // certified per-shell length increment

  double delta_sum() const {
    double s = 0.0;
    for (double d : delta) s += d;
    return s;
  }
};

}  // namespace folia
