#pragma once

// Least-squares plateau polynomials: close to 1 on the on-set samples and
// close to 0 on the off-set samples, with degree escalation.
//
// The fitter works in a structured basis  prefix(u) * (u/S)^j  where
//   prefix(u) = u^k0 * prod_m ((u - g_m)/s_m)^{k_m}.
// The monomial power suppresses off-sets nested strictly inside the on-set's
// modulus; the shifted factors put high-order zeros on off-clusters that sit
// at comparable modulus but separated positions. Both carry the large
// contrasts exactly, so the least-squares block stays low-degree and
// well-conditioned. Contrasts beyond the reach of a single solve are built
// as powers p = q^L: sup bounds multiply while on-set errors only add.

#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>

#include "folia/polynomial.hpp"

namespace folia {

namespace detail {
inline bool fit_debug() {
  static const bool on = std::getenv("FOLIA_FIT_DEBUG") != nullptr;
  return on;
}
}  // namespace detail

struct PlateauRequest {
  int max_degree = 900;
  double on_tol = 1e-3;   // |p - 1| on the on-set
  double off_tol = 1e-3;  // |p| on the off-set
};

struct PlateauFit {
  PolyFunc poly;
  double on_error = 0.0;
  double off_error = 0.0;
  int degree = 0;
  int prefix_power = 0;
};

namespace detail {

struct ZeroCluster {
  Complex center;
  double radius = 0.0;   // sample spread about the centroid
  double max_mod = 0.0;  // largest sample modulus in the cluster
  double gap = 0.0;      // log(dist-to-on / radius)
  int power = 0;
  double scale = 1.0;
};

struct PrefixSpec {
  int k0 = 0;
  std::vector<ZeroCluster> clusters;

  int total_power() const {
    int t = k0;
    for (const auto& c : clusters) t += c.power;
    return t;
  }

  Complex eval(Complex u) const {
    Complex v(1, 0);
    for (int t = 0; t < k0; ++t) v *= u;
    for (const auto& c : clusters) {
      const Complex f = (u - c.center) / c.scale;
      for (int t = 0; t < c.power; ++t) v *= f;
    }
    return v;
  }

  // Expanded monomial coefficients of the prefix (times the k0 zeros).
  std::vector<Complex> coefficients() const {
    std::vector<Complex> acc{Complex(1, 0)};
    for (const auto& c : clusters) {
      for (int t = 0; t < c.power; ++t) {
        std::vector<Complex> next(acc.size() + 1, Complex(0, 0));
        for (std::size_t i = 0; i < acc.size(); ++i) {
          next[i + 1] += acc[i] / c.scale;
          next[i] -= acc[i] * c.center / c.scale;
        }
        acc = std::move(next);
      }
    }
    std::vector<Complex> out(acc.size() + std::size_t(k0), Complex(0, 0));
    for (std::size_t i = 0; i < acc.size(); ++i) out[i + std::size_t(k0)] = acc[i];
    return out;
  }
};

// One weighted least-squares solve over the basis prefix(u) (u/S)^j. Errors
// are measured by evaluating the assembled monomial polynomial, so any
// conditioning or expansion loss is caught. When `on_targets` is nonempty it
// carries per-sample target values (used by the refinement rounds);
// otherwise the target is 1 and errors are measured against 1.
inline PlateauFit ladder_solve(const std::vector<Complex>& on,
                               const std::vector<Complex>& off,
                               const PrefixSpec& prefix, int dh, double on_tol,
                               double off_tol,
                               const std::vector<Complex>& on_targets = {},
                               const std::vector<Complex>& off_targets = {}) {
  double scale = 1e-9;
  for (const auto& u : on) scale = std::max(scale, std::abs(u));
  for (const auto& u : off) scale = std::max(scale, std::abs(u));

  const std::size_t rows = on.size() + off.size();
  const int cols = dh + 1;
  const double w_on = 1.0 / on_tol, w_off = 1.0 / off_tol;
  Eigen::MatrixXcd A(rows, cols);
  Eigen::VectorXcd y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex u = i < on.size() ? on[i] : off[i - on.size()];
    const double w = i < on.size() ? w_on : w_off;
    Complex col = prefix.eval(u) * w;
    const Complex us = u / scale;
    for (int j = 0; j < cols; ++j) {
      A(i, j) = col;
      col *= us;
    }
    Complex target(0, 0);
    if (i < on.size())
      target = on_targets.empty() ? Complex(1, 0) : on_targets[i];
    else if (!off_targets.empty())
      target = off_targets[i - on.size()];
    y(i) = target * w;
  }
  Eigen::VectorXd cn(cols);
  for (int j = 0; j < cols; ++j) {
    const double nj = A.col(j).norm();
    cn(j) = nj > 1e-300 ? nj : 1.0;
    A.col(j) /= cn(j);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-13);
  Eigen::VectorXcd a = svd.solve(y);
  for (int j = 0; j < cols; ++j) a(j) /= cn(j);

  PlateauFit fit;
  fit.prefix_power = prefix.total_power();
  fit.degree = fit.prefix_power + dh;
  fit.poly = PolyFunc::zero(1);

  const std::vector<Complex> pc = prefix.coefficients();
  fit.poly.coeffs.assign(pc.size() + std::size_t(cols) - 1, Complex(0, 0));
  double div = 1.0;
  for (int j = 0; j < cols; ++j) {
    const Complex aj = a(j) / div;
    div *= scale;
    if (aj == Complex(0, 0)) continue;
    for (std::size_t i = 0; i < pc.size(); ++i) fit.poly.coeffs[i + std::size_t(j)] += aj * pc[i];
  }
  for (const auto& c : fit.poly.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      fit.on_error = fit.off_error = 1e300;
      return fit;
    }
  for (std::size_t i = 0; i < on.size(); ++i) {
    const Complex target = on_targets.empty() ? Complex(1, 0) : on_targets[i];
    fit.on_error = std::max(fit.on_error, std::abs(fit.poly.eval1(on[i]) - target));
  }
  for (std::size_t i = 0; i < off.size(); ++i) {
    const Complex target = off_targets.empty() ? Complex(0, 0) : off_targets[i];
    fit.off_error = std::max(fit.off_error, std::abs(fit.poly.eval1(off[i]) - target));
  }
  return fit;
}

inline std::vector<Complex> poly_pow_coeffs(const std::vector<Complex>& base, int power) {
  std::vector<Complex> acc{Complex(1, 0)};
  for (int p = 0; p < power; ++p) {
    std::vector<Complex> next(acc.size() + base.size() - 1, Complex(0, 0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == Complex(0, 0)) continue;
      for (std::size_t j = 0; j < base.size(); ++j) next[i + j] += acc[i] * base[j];
    }
    acc = std::move(next);
  }
  return acc;
}

// Cluster the off-samples that are not modulus-nested under the on-set.
inline std::vector<ZeroCluster> make_clusters(const std::vector<Complex>& outer,
                                              const std::vector<Complex>& on) {
  std::vector<ZeroCluster> clusters;
  std::vector<char> used(outer.size(), 0);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (used[i]) continue;
    Complex centroid = outer[i];
    std::vector<std::size_t> members{i};
    used[i] = 1;
    // Two passes of fixed-radius gathering around the running centroid.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < outer.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(outer[j] - centroid) < 0.32) {
          used[j] = 1;
          members.push_back(j);
        }
      }
      Complex sum(0, 0);
      for (auto idx : members) sum += outer[idx];
      centroid = sum / double(members.size());
    }
    ZeroCluster c;
    c.center = centroid;
    for (auto idx : members) {
      c.radius = std::max(c.radius, std::abs(outer[idx] - centroid));
      c.max_mod = std::max(c.max_mod, std::abs(outer[idx]));
    }
    c.radius += 1e-3;
    double don = 1e300;
    for (const auto& u : on) don = std::min(don, std::abs(u - centroid));
    if (don <= c.radius) {
      c.gap = -1.0;  // overlapping; infeasible via zero factors
    } else {
      c.gap = std::log(don / c.radius);
      c.scale = don;
    }
    clusters.push_back(c);
  }
  return clusters;
}

inline PlateauFit fit_plateau_univariate(const std::vector<Complex>& on,
                                         const std::vector<Complex>& off,
                                         const PlateauRequest& req) {
  if (on.empty()) throw Error("empty on-set");
  for (const auto& a : on)
    for (const auto& b : off)
      if (std::abs(a - b) < 1e-12) throw Error("plateau on/off sets overlap");

  if (off.empty()) {
    PlateauFit fit;
    fit.poly = PolyFunc::constant(1, Complex(1, 0));
    return fit;
  }

  double r_on_min = 1e300, r_on_max = 0.0;
  for (const auto& u : on) {
    r_on_min = std::min(r_on_min, std::abs(u));
    r_on_max = std::max(r_on_max, std::abs(u));
  }

  // Cluster the whole off-set first, then classify per cluster: clusters
  // nested strictly inside the on-set's modulus ride the u^k0 prefix, the
  // rest get zero factors. Classifying per sample would tear apart clusters
  // that straddle the modulus threshold.
  std::vector<ZeroCluster> clusters;
  double r_inner = 0.0;
  {
    const auto all = make_clusters(off, on);
    for (const auto& c : all) {
      if (c.max_mod <= 0.95 * r_on_min) {
        r_inner = std::max(r_inner, c.max_mod);
      } else {
        if (c.gap < 0.0) throw Error("plateau fit failed; increase degree or margins");
        clusters.push_back(c);
      }
    }
  }
  const double g_near = r_inner > 1e-12 ? std::log(r_on_min / r_inner) : 0.0;

  const double contrast = 30.0 / std::min(req.off_tol, req.on_tol);
  const double log_contrast = std::log(contrast);

  auto prefix_for = [&](double share, int cap) {
    PrefixSpec p;
    if (r_inner > 1e-12 && g_near > 1e-9)
      p.k0 = std::clamp(int(std::ceil(share * log_contrast / g_near)), 0, cap);
    for (const auto& c : clusters) {
      ZeroCluster zc = c;
      zc.power = std::clamp(int(std::ceil(share * std::log(30.0 / req.off_tol) / c.gap)),
                            1, 80);
      p.clusters.push_back(zc);
    }
    return p;
  };

  if (fit_debug()) {
    std::fprintf(stderr,
                 "[fit] on=%zu off=%zu r_on=[%.3f,%.3f] r_inner=%.3f g=%.4f "
                 "clusters=%zu tol=(%.1e,%.1e)\n",
                 on.size(), off.size(), r_on_min, r_on_max, r_inner, g_near,
                 clusters.size(), req.on_tol, req.off_tol);
    for (const auto& c : clusters)
      std::fprintf(stderr, "[fit]   cluster c=(%.3f,%.3f) rad=%.3f gap=%.3f\n",
                   c.center.real(), c.center.imag(), c.radius, c.gap);
  }

  PlateauFit best;
  bool have = false;

  // Iterative refinement: fit a correction against the measured residual.
  // Each round's contrast is only (residual / tolerance), so corrections
  // converge geometrically where a single joint solve stalls.
  auto refine = [&](PlateauFit fit) {
    for (int round = 0; round < 3; ++round) {
      if (fit.on_error <= 0.9 * req.on_tol && fit.off_error <= 0.9 * req.off_tol) break;
      std::vector<Complex> resid(on.size()), off_resid(off.size());
      double rmax = 0.0;
      for (std::size_t i = 0; i < on.size(); ++i) {
        resid[i] = Complex(1, 0) - fit.poly.eval1(on[i]);
        rmax = std::max(rmax, std::abs(resid[i]));
      }
      for (std::size_t i = 0; i < off.size(); ++i)
        off_resid[i] = -fit.poly.eval1(off[i]);
      if (rmax < 1e-18) break;
      PrefixSpec p = prefix_for(1.0, 170);
      const int dh = std::min(220, req.max_degree - p.total_power());
      if (dh < 8) break;
      const PlateauFit corr = ladder_solve(on, off, p, dh, 0.55 * req.on_tol,
                                           0.5 * req.off_tol, resid, off_resid);
      if (fit_debug())
        std::fprintf(stderr, "[fit]   corr solve (rmax=%.2e): on=%.2e off=%.2e\n",
                     rmax, corr.on_error, corr.off_error);
      PlateauFit merged = fit;
      merged.poly += corr.poly;
      merged.degree = std::max(fit.degree, corr.degree);
      merged.on_error = 0.0;
      merged.off_error = 0.0;
      for (const auto& u : on)
        merged.on_error =
            std::max(merged.on_error, std::abs(merged.poly.eval1(u) - Complex(1, 0)));
      for (const auto& u : off)
        merged.off_error = std::max(merged.off_error, std::abs(merged.poly.eval1(u)));
      if (fit_debug())
        std::fprintf(stderr, "[fit]   refine round %d -> on=%.2e off=%.2e\n", round,
                     merged.on_error, merged.off_error);
      const double before = std::max(fit.on_error / req.on_tol, fit.off_error / req.off_tol);
      const double after =
          std::max(merged.on_error / req.on_tol, merged.off_error / req.off_tol);
      if (after >= 0.9 * before) break;
      fit = std::move(merged);
    }
    return fit;
  };

  auto consider = [&](PlateauFit fit) {
    if (fit_debug())
      std::fprintf(stderr, "[fit]   try prefix=%d deg=%d -> on=%.2e off=%.2e\n",
                   fit.prefix_power, fit.degree, fit.on_error, fit.off_error);
    // Near misses are worth a few refinement rounds before escalating.
    if ((fit.on_error > 0.9 * req.on_tol || fit.off_error > 0.9 * req.off_tol) &&
        fit.on_error < 60.0 * req.on_tol && fit.off_error < 60.0 * req.off_tol)
      fit = refine(std::move(fit));
    if (!have || std::max(fit.on_error / req.on_tol, fit.off_error / req.off_tol) <
                     std::max(best.on_error / req.on_tol, best.off_error / req.off_tol)) {
      best = fit;
      have = true;
    }
    return fit.on_error <= 0.9 * req.on_tol && fit.off_error <= 0.9 * req.off_tol;
  };

  // Attempt 1: structured prefix + ladder, escalating the free block. The
  // prefix power for the nested part is held below the conditioning wall.
  {
    std::vector<double> shares{1.0};
    if (r_inner > 1e-12) shares = {1.0, 1.4, 0.7};
    for (double share : shares) {
      PrefixSpec p = prefix_for(share, 170);
      if (p.total_power() > req.max_degree) continue;
      for (int dh = 16; p.total_power() + dh <= std::min(req.max_degree, p.total_power() + 430);
           dh += std::max(16, (2 * dh) / 3)) {
        if (consider(ladder_solve(on, off, p, dh, req.on_tol, req.off_tol))) return best;
      }
    }
  }

  // Attempt 2: plain ladder without prefixes (positions may separate the
  // sets even when moduli do not).
  {
    PrefixSpec p;
    for (int dh = 24; dh <= std::min(req.max_degree, 460); dh += std::max(24, (2 * dh) / 3)) {
      if (consider(ladder_solve(on, off, p, dh, req.on_tol, req.off_tol))) return best;
    }
  }

  // Attempt 3: power construction p = q^L for contrasts beyond a single
  // solve. The base keeps the same structured prefix at 1/L of the power.
  if (g_near > 1e-9 || !clusters.empty()) {
    const double total = g_near > 1e-9 ? log_contrast / g_near : 120.0;
    const int l_lo = std::max(2, int(std::ceil(total / 130.0)));
    for (int L : {l_lo, l_lo + 1, l_lo + 2}) {
      const double c_target = std::pow(req.off_tol / 3.0, 1.0 / L);
      const double on_tol_l = req.on_tol / (3.0 * L);
      PrefixSpec p;
      if (g_near > 1e-9)
        p.k0 = std::clamp(int(std::ceil(std::log(3.0 / c_target) / g_near)), 1,
                          std::max(1, req.max_degree / L));
      for (const auto& c : clusters) {
        ZeroCluster zc = c;
        zc.power = std::clamp(int(std::ceil(std::log(3.0 / c_target) / c.gap)), 1, 60);
        p.clusters.push_back(zc);
      }
      for (int dh = 24; dh <= 200 && L * (p.total_power() + dh) <= req.max_degree;
           dh += std::max(16, dh / 2)) {
        const PlateauFit base = ladder_solve(on, off, p, dh, on_tol_l, c_target);
        if (base.on_error > on_tol_l || base.off_error > c_target) continue;
        PlateauFit fit;
        fit.poly = PolyFunc::zero(1);
        fit.poly.coeffs = poly_pow_coeffs(base.poly.coeffs, L);
        fit.degree = L * (p.total_power() + dh);
        fit.prefix_power = L * p.total_power();
        bool finite = true;
        for (const auto& c : fit.poly.coeffs)
          if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) finite = false;
        if (!finite) continue;
        for (const auto& u : on)
          fit.on_error = std::max(fit.on_error, std::abs(fit.poly.eval1(u) - Complex(1, 0)));
        for (const auto& u : off)
          fit.off_error = std::max(fit.off_error, std::abs(fit.poly.eval1(u)));
        if (consider(fit)) return best;
      }
    }
  }

  if (have && best.on_error <= req.on_tol && best.off_error <= req.off_tol) return best;
  throw Error("plateau fit failed; increase degree or margins");
}

inline void multi_indices(std::size_t nvars, int max_total,
                          std::vector<std::vector<std::uint16_t>>& out) {
  std::vector<std::uint16_t> cur(nvars, 0);
  auto rec = [&](auto&& self, std::size_t v, int left) -> void {
    if (v == nvars) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[v] = std::uint16_t(e);
      self(self, v + 1, left - e);
    }
    cur[v] = 0;
  };
  rec(rec, 0, max_total);
}

inline PlateauFit fit_plateau_multivariate(const std::vector<std::vector<Complex>>& on,
                                           const std::vector<std::vector<Complex>>& off,
                                           const PlateauRequest& req) {
  if (on.empty()) throw Error("empty on-set");
  const std::size_t nvars = on[0].size();
  if (off.empty()) {
    PlateauFit fit;
    fit.poly = PolyFunc::constant(nvars, Complex(1, 0));
    return fit;
  }
  double scale = 1e-9;
  for (const auto& s : on)
    for (const auto& u : s) scale = std::max(scale, std::abs(u));
  for (const auto& s : off)
    for (const auto& u : s) scale = std::max(scale, std::abs(u));

  const std::size_t rows = on.size() + off.size();
  const double w_on = 1.0 / req.on_tol, w_off = 1.0 / req.off_tol;
  PlateauFit best;
  bool have = false;
  for (int d = 1; d <= req.max_degree; d = d + std::max(1, d / 2)) {
    std::vector<std::vector<std::uint16_t>> exps;
    multi_indices(nvars, d, exps);
    if (exps.size() > 4000) break;
    Eigen::MatrixXcd A(rows, exps.size());
    Eigen::VectorXcd y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto& s = i < on.size() ? on[i] : off[i - on.size()];
      const double w = i < on.size() ? w_on : w_off;
      for (std::size_t j = 0; j < exps.size(); ++j) {
        Complex t(1, 0);
        for (std::size_t v = 0; v < nvars; ++v)
          for (std::uint16_t e = 0; e < exps[j][v]; ++e) t *= s[v] / scale;
        A(i, j) = t * w;
      }
      y(i) = i < on.size() ? Complex(w, 0) : Complex(0, 0);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    Eigen::VectorXcd a = svd.solve(y);
    PolyFunc poly = PolyFunc::zero(nvars);
    for (std::size_t j = 0; j < exps.size(); ++j) {
      double div = 1.0;
      for (std::size_t v = 0; v < nvars; ++v)
        for (std::uint16_t e = 0; e < exps[j][v]; ++e) div *= scale;
      poly.exponents.push_back(exps[j]);
      poly.term_coeffs.push_back(a(j) / div);
    }
    double on_err = 0.0, off_err = 0.0;
    for (const auto& s : on)
      on_err = std::max(on_err, std::abs(poly.eval(std::span<const Complex>(s)) - Complex(1, 0)));
    for (const auto& s : off)
      off_err = std::max(off_err, std::abs(poly.eval(std::span<const Complex>(s))));
    if (!have || std::max(on_err / req.on_tol, off_err / req.off_tol) <
                     std::max(best.on_error / req.on_tol, best.off_error / req.off_tol)) {
      best.poly = std::move(poly);
      best.on_error = on_err;
      best.off_error = off_err;
      best.degree = d;
      have = true;
    }
    if (on_err <= 0.9 * req.on_tol && off_err <= 0.9 * req.off_tol) return best;
  }
  if (have && best.on_error <= req.on_tol && best.off_error <= req.off_tol) return best;
  throw Error("plateau fit failed; increase degree or margins");
}

}  // namespace detail

inline PlateauFit fit_plateau_poly(const std::vector<Complex>& on,
                                   const std::vector<Complex>& off, int max_degree,
                                   double tol) {
  PlateauRequest req;
  req.max_degree = max_degree;
  req.on_tol = tol;
  req.off_tol = tol;
  return detail::fit_plateau_univariate(on, off, req);
}

inline PlateauFit fit_plateau_poly(const std::vector<Complex>& on,
                                   const std::vector<Complex>& off,
                                   const PlateauRequest& req) {
  return detail::fit_plateau_univariate(on, off, req);
}

inline PlateauFit fit_plateau_poly(const std::vector<std::vector<Complex>>& on,
                                   const std::vector<std::vector<Complex>>& off,
                                   int max_degree, double tol) {
  PlateauRequest req;
  req.max_degree = max_degree;
  req.on_tol = tol;
  req.off_tol = tol;
  if (!on.empty() && on[0].size() == 1) {
    std::vector<Complex> on1, off1;
    for (const auto& s : on) on1.push_back(s[0]);
    for (const auto& s : off) off1.push_back(s[0]);
    return detail::fit_plateau_univariate(on1, off1, req);
  }
  return detail::fit_plateau_multivariate(on, off, req);
}

}  // namespace folia
