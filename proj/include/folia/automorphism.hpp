#pragma once

// Automorphisms of C^n as composition chains of elementary maps with
// closed-form inverses:
//   affine     z -> M z + b              (M invertible; inverse cached)
//   shear      z -> z + f(pi(z)) e       (pi = coordinates orthogonal to e)
//   overshear  z -> z + (exp(g(pi(z))) - 1) <z,e> e
// Shear and overshear inverses negate f resp. g; the gate argument pi(z) is
// untouched by the map itself, so round trips cancel algebraically and the
// only residual is floating-point noise.

#include <memory>

#include "folia/polynomial.hpp"

namespace folia {

constexpr double kEscapeNorm = 1e100;

namespace detail {

inline void check_finite_bounded(const CPoint& p) {
  for (const auto& c : p.z) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) ||
        std::abs(c.real()) > kEscapeNorm || std::abs(c.imag()) > kEscapeNorm)
      throw Error("escaped to infinity");
  }
}

// Dense complex n x n matrix, row major.
struct CMat {
  std::size_t n = 0;
  std::vector<Complex> a;

  static CMat identity(std::size_t n) {
    CMat m;
    m.n = n;
    m.a.assign(n * n, Complex(0, 0));
    for (std::size_t i = 0; i < n; ++i) m.a[i * n + i] = Complex(1, 0);
    return m;
  }

  Complex& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  CPoint apply(const CPoint& p) const {
    CPoint out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex s(0, 0);
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * p.z[j];
      out.z[i] = s;
    }
    return out;
  }

  // Gauss-Jordan inverse with partial pivoting; throws on singularity.
  CMat inverse() const {
    CMat A = *this;
    CMat I = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      double best = std::abs(A.at(col, col));
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(A.at(r, col)) > best) {
          best = std::abs(A.at(r, col));
          piv = r;
        }
      if (best < 1e-14) throw Error("non-invertible elementary map");
      if (piv != col)
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(A.at(piv, j), A.at(col, j));
          std::swap(I.at(piv, j), I.at(col, j));
        }
      const Complex d = A.at(col, col);
      for (std::size_t j = 0; j < n; ++j) {
        A.at(col, j) /= d;
        I.at(col, j) /= d;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const Complex f = A.at(r, col);
        if (f == Complex(0, 0)) continue;
        for (std::size_t j = 0; j < n; ++j) {
          A.at(r, j) -= f * A.at(col, j);
          I.at(r, j) -= f * I.at(col, j);
        }
      }
    }
    return I;
  }
};

}  // namespace detail

struct ElementaryAut {
  enum class Kind { Affine, Shear, Overshear } kind = Kind::Affine;

  // Affine data.
  detail::CMat linear, linear_inv;
  CPoint offset;

  // Shear / overshear data: unit direction, orthonormal complement basis
  // (gate arguments are <z, basis[k]>), and the gate polynomial.
  CPoint direction;
  std::vector<CPoint> basis;
  PolyFunc gate;

  std::size_t dim() const {
    return kind == Kind::Affine ? offset.dim() : direction.dim();
  }

  CPoint apply(const CPoint& p, bool inverse) const {
    switch (kind) {
      case Kind::Affine: {
        if (!inverse) {
          CPoint out = linear.apply(p);
          out += offset;
          return out;
        }
        CPoint q = p - offset;
        return linear_inv.apply(q);
      }
      case Kind::Shear: {
        std::vector<Complex> args(basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k) args[k] = cdot(p, basis[k]);
        Complex v = gate.eval(args);
        if (inverse) v = -v;
        CPoint out = p;
        for (std::size_t i = 0; i < out.dim(); ++i) out.z[i] += v * direction.z[i];
        return out;
      }
      case Kind::Overshear: {
        std::vector<Complex> args(basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k) args[k] = cdot(p, basis[k]);
        Complex g = gate.eval(args);
        if (inverse) g = -g;
        const Complex factor = std::exp(g) - Complex(1, 0);
        const Complex comp = cdot(p, direction);
        CPoint out = p;
        for (std::size_t i = 0; i < out.dim(); ++i)
          out.z[i] += factor * comp * direction.z[i];
        return out;
      }
    }
    throw Error("corrupt elementary map");
  }
};

// Orthonormal complement of a unit complex direction (Hermitian metric).
inline std::vector<CPoint> unitary_complement(const CPoint& e) {
  const std::size_t n = e.dim();
  std::vector<CPoint> basis;
  if (n == 2) {
    CPoint b(2);
    b.z[0] = -std::conj(e.z[1]);
    b.z[1] = std::conj(e.z[0]);
    basis.push_back(b);
    return basis;
  }
  // Gram-Schmidt against e and previous vectors, seeded by coordinate axes.
  for (std::size_t seed = 0; seed < n && basis.size() + 1 < n; ++seed) {
    CPoint v(n);
    v.z[seed] = Complex(1, 0);
    Complex ce = cdot(v, e);
    for (std::size_t i = 0; i < n; ++i) v.z[i] -= ce * e.z[i];
    for (const auto& b : basis) {
      Complex cb = cdot(v, b);
      for (std::size_t i = 0; i < n; ++i) v.z[i] -= cb * b.z[i];
    }
    const double vn = norm(v);
    if (vn > 1e-8) {
      v *= 1.0 / vn;
      basis.push_back(v);
    }
  }
  if (basis.size() + 1 != n) throw Error("degenerate direction");
  return basis;
}

inline ElementaryAut make_shear(const CPoint& direction, const PolyFunc& gate) {
  ElementaryAut a;
  a.kind = ElementaryAut::Kind::Shear;
  a.direction = direction;
  const double dn = norm(direction);
  if (dn < 1e-14) throw Error("degenerate direction");
  a.direction *= 1.0 / dn;
  a.basis = unitary_complement(a.direction);
  a.gate = gate;
  return a;
}

inline ElementaryAut make_overshear(const CPoint& direction, const PolyFunc& gate) {
  ElementaryAut a = make_shear(direction, gate);
  a.kind = ElementaryAut::Kind::Overshear;
  return a;
}

inline ElementaryAut make_affine(const detail::CMat& m, const CPoint& b) {
  ElementaryAut a;
  a.kind = ElementaryAut::Kind::Affine;
  a.linear = m;
  a.linear_inv = m.inverse();
  a.offset = b;
  return a;
}

inline ElementaryAut make_translation(const CPoint& b) {
  return make_affine(detail::CMat::identity(b.dim()), b);
}

struct AutChain {
  std::size_t n = 2;
  std::vector<ElementaryAut> elems;  // elems[0] acts first

  AutChain() = default;
  explicit AutChain(std::size_t dim) : n(dim) {}

  std::size_t size() const { return elems.size(); }

  void push(ElementaryAut a) {
    if (a.dim() != n) throw Error("dimension mismatch");
    elems.push_back(std::move(a));
  }

  AutChain prefix(std::size_t count) const {
    AutChain c(n);
    c.elems.assign(elems.begin(), elems.begin() + std::min(count, elems.size()));
    return c;
  }
};

inline CPoint eval(const AutChain& chain, CPoint p) {
  if (p.dim() != chain.n) throw Error("dimension mismatch");
  detail::check_finite_bounded(p);
  for (const auto& a : chain.elems) {
    p = a.apply(p, false);
    detail::check_finite_bounded(p);
  }
  return p;
}

inline CPoint eval_inverse(const AutChain& chain, CPoint p) {
  if (p.dim() != chain.n) throw Error("dimension mismatch");
  detail::check_finite_bounded(p);
  for (std::size_t i = chain.elems.size(); i-- > 0;) {
    p = chain.elems[i].apply(p, true);
    detail::check_finite_bounded(p);
  }
  return p;
}

// Chain acting as a after b (i.e. the map a o b).
inline AutChain compose(const AutChain& a, const AutChain& b) {
  if (a.n != b.n) throw Error("dimension mismatch");
  AutChain c(a.n);
  c.elems = b.elems;
  c.elems.insert(c.elems.end(), a.elems.begin(), a.elems.end());
  return c;
}

inline AutChain inverse_chain(const AutChain& a) {
  AutChain c(a.n);
  for (std::size_t i = a.elems.size(); i-- > 0;) {
    ElementaryAut e = a.elems[i];
    switch (e.kind) {
      case ElementaryAut::Kind::Affine: {
        // (Mz + b)^{-1} = M^{-1} z - M^{-1} b
        detail::CMat inv = e.linear_inv;
        CPoint nb = inv.apply(e.offset);
        nb *= -1.0;
        ElementaryAut r;
        r.kind = ElementaryAut::Kind::Affine;
        r.linear = inv;
        r.linear_inv = e.linear;
        r.offset = nb;
        c.elems.push_back(std::move(r));
        break;
      }
      case ElementaryAut::Kind::Shear:
      case ElementaryAut::Kind::Overshear: {
        e.gate *= Complex(-1.0, 0.0);
        c.elems.push_back(std::move(e));
        break;
      }
    }
  }
  return c;
}

// Central finite-difference Jacobian of the chain as a map of R^{2n};
// diagnostics only.
inline std::vector<double> numeric_jacobian(const AutChain& chain, const CPoint& p,
                                            double step = 1e-5) {
  const std::size_t m = 2 * chain.n;
  std::vector<double> J(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    CPoint hi = p, lo = p;
    if (j % 2 == 0) {
      hi.z[j / 2] += Complex(step, 0);
      lo.z[j / 2] -= Complex(step, 0);
    } else {
      hi.z[j / 2] += Complex(0, step);
      lo.z[j / 2] -= Complex(0, step);
    }
    const CPoint fhi = eval(chain, hi), flo = eval(chain, lo);
    for (std::size_t i = 0; i < m; ++i) {
      const double vhi = (i % 2 == 0) ? fhi.z[i / 2].real() : fhi.z[i / 2].imag();
      const double vlo = (i % 2 == 0) ? flo.z[i / 2].real() : flo.z[i / 2].imag();
      J[i * m + j] = (vhi - vlo) / (2.0 * step);
    }
  }
  return J;
}

}  // namespace folia
