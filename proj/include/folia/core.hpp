#pragma once

// Core numeric types: points of C^n stored as n complex (2n real) coordinates,
// Euclidean metric helpers, polyline lengths, and a deterministic RNG façade
// used by every module that samples.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace folia {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A point of C^n, n >= 1. The real/imaginary parts are the 2n real
// coordinates; all distance computations use the Euclidean metric of R^{2n}.
struct CPoint {
  std::vector<Complex> z;

  CPoint() = default;
  explicit CPoint(std::size_t n) : z(n, Complex(0.0, 0.0)) {}
  CPoint(std::initializer_list<Complex> init) : z(init) {}

  std::size_t dim() const { return z.size(); }
  Complex& operator[](std::size_t i) { return z[i]; }
  const Complex& operator[](std::size_t i) const { return z[i]; }

  bool finite() const {
    for (const auto& c : z)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }

  CPoint& operator+=(const CPoint& o) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += o.z[i];
    return *this;
  }
  CPoint& operator-=(const CPoint& o) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= o.z[i];
    return *this;
  }
  CPoint& operator*=(double s) {
    for (auto& c : z) c *= s;
    return *this;
  }
  friend CPoint operator+(CPoint a, const CPoint& b) { return a += b; }
  friend CPoint operator-(CPoint a, const CPoint& b) { return a -= b; }
  friend CPoint operator*(double s, CPoint a) { return a *= s; }
};

inline double norm(const CPoint& p) {
  double s = 0.0;
  for (const auto& c : p.z) s += c.real() * c.real() + c.imag() * c.imag();
  return std::sqrt(s);
}

inline double dist(const CPoint& a, const CPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.z.size(); ++i) {
    const double dr = a.z[i].real() - b.z[i].real();
    const double di = a.z[i].imag() - b.z[i].imag();
    s += dr * dr + di * di;
  }
  return std::sqrt(s);
}

// Hermitian inner product <a, b> = sum a_k conj(b_k).
inline Complex cdot(const CPoint& a, const CPoint& b) {
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < a.z.size(); ++i) s += a.z[i] * std::conj(b.z[i]);
  return s;
}

// Real inner product of the underlying R^{2n} vectors.
inline double rdot(const CPoint& a, const CPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.z.size(); ++i)
    s += a.z[i].real() * b.z[i].real() + a.z[i].imag() * b.z[i].imag();
  return s;
}

// Max modulus over the first n-1 coordinates (the polydisc radius of z').
inline double base_polyradius(const CPoint& p) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < p.z.size(); ++i)
    m = std::max(m, std::abs(p.z[i]));
  return m;
}

inline double polyline_length(std::span<const CPoint> pts) {
  if (pts.size() < 2) throw Error("degenerate path");
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += dist(pts[i - 1], pts[i]);
  return total;
}

inline double polyline_length(const std::vector<CPoint>& pts) {
  return polyline_length(std::span<const CPoint>(pts));
}

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 with explicit bit-to-double mapping so
// that every sampled certificate is reproducible from the config seed alone
// (std::uniform_real_distribution is implementation-defined).
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift* variant; small, fast, reproducible everywhere.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (deterministic given the stream).
  double normal() {
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Uniform direction on the unit sphere of R^{2n}.
  CPoint sphere_dir(std::size_t n) {
    CPoint p(n);
    double s = 0.0;
    do {
      for (std::size_t i = 0; i < n; ++i) {
        p.z[i] = Complex(normal(), normal());
      }
      s = norm(p);
    } while (s < 1e-12);
    p *= 1.0 / s;
    return p;
  }

  // Uniform in the solid ball of radius r in R^{2n}.
  CPoint ball_point(std::size_t n, double r) {
    CPoint d = sphere_dir(n);
    const double u = std::pow(uniform(), 1.0 / double(2 * n));
    d *= r * u;
    return d;
  }

  Rng fork(std::uint64_t tag) {
    return Rng(state_ ^ (0x9e3779b97f4a7c15ull * (tag + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace folia
