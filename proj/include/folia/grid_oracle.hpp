#pragma once

// Shortest-avoiding-path oracle: multi-source Dijkstra on the regular grid of
// R^{2n} restricted to a spherical shell with plate cells removed. Moves are
// the full {-1,0,1}^{2n} stencil with exact Euclidean step costs.
//
// Plate cells are removed only when the cell center lies in the plate eroded
// by the cell circumradius, and endpoint bookkeeping is one-sided (source
// cells start at their radial excess, target overshoot is subtracted), so the
// reported value never gains length from discretization at the boundaries.
//
// When the plate configuration is invariant under signed coordinate
// permutations (the built-in layouts are), the search runs on canonical orbit
// representatives. That folding is exact -- sources, targets and obstacles
// are all invariant, so the quotient optimum equals the full-grid optimum --
// and shrinks the grid by up to |G| = 2^m m!.

#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>

#include "folia/labyrinth.hpp"

namespace folia {

struct OracleResult {
  double length = std::numeric_limits<double>::infinity();
  bool reachable = false;
  bool folded = false;
  double grid_step = 0.0;
  std::size_t cells = 0;      // nodes materialized
  std::size_t expanded = 0;   // nodes settled
};

namespace detail {

inline bool plates_symmetric(const std::vector<Plate>& plates, double tol = 1e-9) {
  if (plates.empty()) return true;
  const std::size_t m = 2 * plates[0].dim();
  auto real_coord = [](const CPoint& p, std::size_t i) {
    return (i % 2 == 0) ? p.z[i / 2].real() : p.z[i / 2].imag();
  };
  auto apply = [&](const Plate& pl, auto&& f) {
    Plate out = pl;
    for (std::size_t i = 0; i < m; ++i) {
      double c = real_coord(pl.center, i);
      double nv = real_coord(pl.normal, i);
      f(i, c, nv);
      if (i % 2 == 0) {
        out.center.z[i / 2].real(c);
        out.normal.z[i / 2].real(nv);
      } else {
        out.center.z[i / 2].imag(c);
        out.normal.z[i / 2].imag(nv);
      }
    }
    return out;
  };
  auto matches_some = [&](const Plate& q) {
    for (const auto& pl : plates) {
      if (std::abs(pl.radius - q.radius) > tol) continue;
      if (std::abs(pl.thickness - q.thickness) > tol) continue;
      if (dist(pl.center, q.center) > tol) continue;
      const double a = std::abs(rdot(pl.normal, q.normal));
      if (std::abs(a - 1.0) < 1e-7) return true;
    }
    return false;
  };
  // Generators: swap of adjacent real coordinates, sign flip of the first.
  for (std::size_t g = 0; g + 1 < m; ++g) {
    for (const auto& pl : plates) {
      std::vector<double> c(m), nv(m);
      for (std::size_t i = 0; i < m; ++i) {
        c[i] = real_coord(pl.center, i);
        nv[i] = real_coord(pl.normal, i);
      }
      std::swap(c[g], c[g + 1]);
      std::swap(nv[g], nv[g + 1]);
      Plate q = apply(pl, [&](std::size_t i, double& cc, double& nn) {
        cc = c[i];
        nn = nv[i];
      });
      if (!matches_some(q)) return false;
    }
  }
  for (const auto& pl : plates) {
    Plate q = apply(pl, [&](std::size_t i, double& cc, double& nn) {
      if (i == 0) {
        cc = -cc;
        nn = -nn;
      }
    });
    if (!matches_some(q)) return false;
  }
  return true;
}

struct CellKey {
  // Packs up to 4 signed 16-bit lattice coordinates; enough for n = 2.
  static std::uint64_t pack(const std::vector<int>& k) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < k.size(); ++i)
      key |= (std::uint64_t(std::uint16_t(std::int16_t(k[i]))) << (16 * i));
    return key;
  }
};

}  // namespace detail

struct OracleOptions {
  bool allow_fold = true;
  std::size_t max_cells = 80'000'000;
};

inline OracleResult estimate_min_avoiding_length(const Shell& shell,
                                                 const std::vector<Plate>& plates,
                                                 double grid_step, std::size_t n,
                                                 const OracleOptions& opts = {}) {
  if (!(grid_step > 0.0)) throw Error("grid step must be positive");
  for (const auto& pl : plates)
    if (pl.thickness < 2.0 * grid_step) throw Error("unresolved obstacles");
  const std::size_t m = 2 * n;
  if (m > 4) throw Error("grid oracle supports n = 2");
  const double h = grid_step;
  const double erode = 0.5 * h * std::sqrt(double(m));
  const bool fold = opts.allow_fold && detail::plates_symmetric(plates);

  // All nonzero moves in {-1,0,1}^m with their Euclidean costs.
  std::vector<std::vector<int>> moves;
  std::vector<double> move_cost;
  {
    std::vector<int> mv(m, -1);
    while (true) {
      bool zero = true;
      for (int v : mv) zero &= (v == 0);
      if (!zero) {
        int s = 0;
        for (int v : mv) s += v * v;
        moves.push_back(mv);
        move_cost.push_back(h * std::sqrt(double(s)));
      }
      std::size_t i = 0;
      while (i < m && mv[i] == 1) mv[i++] = -1;
      if (i == m) break;
      ++mv[i];
    }
  }

  auto canonical = [&](std::vector<int>& k) {
    if (!fold) return;
    for (auto& v : k) v = std::abs(v);
    std::sort(k.begin(), k.end(), std::greater<int>());
  };

  auto cell_norm = [&](const std::vector<int>& k) {
    double s = 0.0;
    for (int v : k) s += double(v) * double(v);
    return h * std::sqrt(s);
  };

  auto blocked = [&](const std::vector<int>& k) {
    if (plates.empty()) return false;
    CPoint p(n);
    for (std::size_t i = 0; i < n; ++i)
      p.z[i] = Complex(k[2 * i] * h, k[2 * i + 1] * h);
    for (const auto& pl : plates)
      if (plate_contains_deflated(pl, p, erode)) return true;
    return false;
  };

  constexpr std::uint32_t kBlocked = 0xffffffffu;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<double> dist_of;
  std::vector<std::vector<int>> cell_of;
  index.reserve(1 << 20);

  const double r_lo = shell.rho_in;
  const double r_hi = shell.rho_out;
  const double band = h * std::sqrt(double(m));

  auto lookup = [&](std::vector<int> k) -> std::uint32_t {
    canonical(k);
    const std::uint64_t key = detail::CellKey::pack(k);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const double r = cell_norm(k);
    std::uint32_t id = kBlocked;
    if (r >= r_lo && r <= r_hi + band && !blocked(k)) {
      if (dist_of.size() >= opts.max_cells) throw Error("grid too large");
      id = std::uint32_t(dist_of.size());
      dist_of.push_back(std::numeric_limits<double>::infinity());
      cell_of.push_back(k);
    }
    index.emplace(key, id);
    return id;
  };

  using HeapItem = std::pair<double, std::uint32_t>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

  // Seed every free cell in the inner band with its radial excess. Under
  // folding only canonical cells (sorted nonnegative coordinates) are walked.
  {
    const double r_band = r_lo + band;
    const long cap2 = long(std::floor((r_band / h) * (r_band / h))) + 1;
    std::vector<int> cur(m, 0);
    auto seed = [&](const std::vector<int>& k) {
      const double r = cell_norm(k);
      if (r < r_lo || r > r_band) return;
      const std::uint32_t id = lookup(k);
      if (id == kBlocked) return;
      const double d0 = r - r_lo;
      if (d0 < dist_of[id]) {
        dist_of[id] = d0;
        heap.emplace(d0, id);
      }
    };
    auto descend = [&](auto&& self, std::size_t i, long sq) -> void {
      if (i == m) {
        seed(cur);
        return;
      }
      const long rem = cap2 - sq;
      if (rem < 0) return;
      const int hi = fold && i > 0 ? std::abs(cur[i - 1])
                                   : int(std::floor(std::sqrt(double(rem))));
      const int lo = fold ? 0 : -hi;
      for (int v = lo; v <= hi; ++v) {
        const long nsq = sq + long(v) * long(v);
        if (nsq > cap2) continue;
        cur[i] = v;
        self(self, i + 1, nsq);
      }
      cur[i] = 0;
    };
    descend(descend, 0, 0);
  }

  OracleResult res;
  res.grid_step = h;
  res.folded = fold;
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> settled;

  while (!heap.empty()) {
    const auto [d, id] = heap.top();
    heap.pop();
    if (settled.size() < dist_of.size()) settled.resize(dist_of.size(), 0);
    if (settled[id]) continue;
    settled[id] = 1;
    ++res.expanded;
    if (d > best + band) break;
    const std::vector<int> here = cell_of[id];
    const double r_here = cell_norm(here);
    if (r_here >= r_hi) {
      const double candidate = d - (r_here - r_hi);
      best = std::min(best, candidate);
      continue;  // paths need not continue past the outer sphere
    }
    std::vector<int> nb(m);
    for (std::size_t mi = 0; mi < moves.size(); ++mi) {
      for (std::size_t i = 0; i < m; ++i) nb[i] = here[i] + moves[mi][i];
      const std::uint32_t nid = lookup(nb);
      if (nid == kBlocked) continue;
      const double nd = d + move_cost[mi];
      if (nid >= settled.size() || !settled[nid]) {
        if (nd < dist_of[nid]) {
          dist_of[nid] = nd;
          heap.emplace(nd, nid);
        }
      }
    }
  }

  res.cells = dist_of.size();
  if (std::isfinite(best)) {
    res.length = std::max(best, 0.0);
    res.reachable = true;
  }
  return res;
}

}  // namespace folia
