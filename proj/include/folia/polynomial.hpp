#pragma once

// Polynomial maps C^{n-1} -> C with explicit complex coefficients. The
// univariate case (n = 2) stores a dense coefficient vector and evaluates by
// Horner; the multivariate case keeps a sparse term list.

#include <cstdint>

#include "folia/core.hpp"

namespace folia {

struct PolyFunc {
  std::size_t nvars = 1;
  // Univariate: dense, coeffs[k] multiplies u^k.
  std::vector<Complex> coeffs;
  // Multivariate: term list.
  std::vector<std::vector<std::uint16_t>> exponents;
  std::vector<Complex> term_coeffs;

  static PolyFunc zero(std::size_t nvars) {
    PolyFunc f;
    f.nvars = nvars;
    return f;
  }

  static PolyFunc constant(std::size_t nvars, Complex c) {
    PolyFunc f;
    f.nvars = nvars;
    if (nvars == 1)
      f.coeffs = {c};
    else {
      f.exponents.push_back(std::vector<std::uint16_t>(nvars, 0));
      f.term_coeffs.push_back(c);
    }
    return f;
  }

  bool is_zero() const {
    if (nvars == 1) {
      for (const auto& c : coeffs)
        if (c != Complex(0.0, 0.0)) return false;
      return true;
    }
    for (const auto& c : term_coeffs)
      if (c != Complex(0.0, 0.0)) return false;
    return true;
  }

  int degree() const {
    if (nvars == 1) return coeffs.empty() ? -1 : int(coeffs.size()) - 1;
    int d = -1;
    for (const auto& e : exponents) {
      int s = 0;
      for (auto v : e) s += v;
      d = std::max(d, s);
    }
    return d;
  }

  Complex eval(std::span<const Complex> args) const {
    if (nvars == 1) {
      const Complex u = args[0];
      Complex acc(0.0, 0.0);
      for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
      return acc;
    }
    Complex acc(0.0, 0.0);
    for (std::size_t t = 0; t < term_coeffs.size(); ++t) {
      Complex term = term_coeffs[t];
      for (std::size_t v = 0; v < nvars; ++v) {
        for (std::uint16_t k = 0; k < exponents[t][v]; ++k) term *= args[v];
      }
      acc += term;
    }
    return acc;
  }

  Complex eval1(Complex u) const { return eval(std::span<const Complex>(&u, 1)); }

  PolyFunc& operator*=(Complex s) {
    for (auto& c : coeffs) c *= s;
    for (auto& c : term_coeffs) c *= s;
    return *this;
  }

  PolyFunc& operator+=(const PolyFunc& o) {
    if (nvars == 1) {
      if (coeffs.size() < o.coeffs.size()) coeffs.resize(o.coeffs.size());
      for (std::size_t i = 0; i < o.coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
      return *this;
    }
    for (std::size_t t = 0; t < o.term_coeffs.size(); ++t) {
      bool merged = false;
      for (std::size_t s = 0; s < exponents.size(); ++s)
        if (exponents[s] == o.exponents[t]) {
          term_coeffs[s] += o.term_coeffs[t];
          merged = true;
          break;
        }
      if (!merged) {
        exponents.push_back(o.exponents[t]);
        term_coeffs.push_back(o.term_coeffs[t]);
      }
    }
    return *this;
  }
};

}  // namespace folia
