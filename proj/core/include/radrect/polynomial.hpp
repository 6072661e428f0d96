#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace radrect {

// Exponent vector over at most 3 unknowns. Systems with unknown distortion
// use (lambda, l1, l2); fixed-distortion systems use (l1, l2) in the first
// two slots.
struct Monomial {
  std::array<uint8_t, 3> e{0, 0, 0};

  int degree() const { return e[0] + e[1] + e[2]; }

  Monomial times(const Monomial& o) const {
    return Monomial{{uint8_t(e[0] + o.e[0]), uint8_t(e[1] + o.e[1]),
                     uint8_t(e[2] + o.e[2])}};
  }

  bool operator==(const Monomial& o) const { return e == o.e; }

  // graded reverse lexicographic, lambda > l1 > l2
  static bool grevlex_less(const Monomial& a, const Monomial& b) {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (int i = 2; i >= 0; --i) {
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    }
    return false;
  }
};

inline Monomial mono(int a, int b, int c = 0) {
  return Monomial{{uint8_t(a), uint8_t(b), uint8_t(c)}};
}

// all monomials in `nvars` unknowns with total degree <= d, grevlex-descending
std::vector<Monomial> monomials_up_to(int nvars, int d);

// Sparse polynomial as a (monomial -> coefficient) map kept in grevlex order.
template <typename T>
struct Poly {
  std::vector<std::pair<Monomial, T>> terms;

  void add_term(const Monomial& m, T c) {
    for (auto& [tm, tc] : terms) {
      if (tm == m) {
        tc = tc + c;
        return;
      }
    }
    terms.emplace_back(m, c);
  }

  void normalize() {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      return Monomial::grevlex_less(b.first, a.first);
    });
    std::erase_if(terms, [](const auto& t) { return t.second == T(0); });
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m.degree());
    return d;
  }

  Poly shifted(const Monomial& mult) const {
    Poly out;
    out.terms.reserve(terms.size());
    for (const auto& [m, c] : terms) out.terms.emplace_back(m.times(mult), c);
    return out;
  }

  template <typename Z>
  auto eval(const Z* z) const {
    Z acc = Z(0);
    for (const auto& [m, c] : terms) {
      Z t = Z(c);
      for (int v = 0; v < 3; ++v)
        for (int k = 0; k < m.e[v]; ++k) t = t * z[v];
      acc = acc + t;
    }
    return acc;
  }
};

template <typename T>
Poly<T> poly_mul(const Poly<T>& a, const Poly<T>& b) {
  Poly<T> out;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) out.add_term(ma.times(mb), ca * cb);
  out.normalize();
  return out;
}

template <typename T>
Poly<T> poly_sub(const Poly<T>& a, const Poly<T>& b) {
  Poly<T> out = a;
  for (const auto& [m, c] : b.terms) out.add_term(m, T(0) - c);
  out.normalize();
  return out;
}

inline std::vector<Monomial> monomials_up_to(int nvars, int d) {
  std::vector<Monomial> out;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; a + b <= d; ++b) {
      if (nvars == 2) {
        out.push_back(mono(a, b));
      } else {
        for (int c = 0; a + b + c <= d; ++c) out.push_back(mono(a, b, c));
      }
    }
  std::sort(out.begin(), out.end(), [](const Monomial& x, const Monomial& y) {
    return Monomial::grevlex_less(y, x);
  });
  return out;
}

}  // namespace radrect
