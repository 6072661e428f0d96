#pragma once

#include <array>
#include <optional>
#include <vector>

#include "radrect/polynomial.hpp"
#include "radrect/types.hpp"

namespace radrect::detail {

// Equation construction shared between the double-precision runtime and the
// exact GF(p) path of the offline template generator.

template <typename T>
struct FrameT {
  std::array<std::array<T, 2>, 3> pts;
};

template <typename T>
struct FrameConsts {
  T d;  // det of the point matrix
  T e;  // det with the third row replaced by squared radii
};

template <typename T>
FrameConsts<T> frame_consts(const FrameT<T>& f) {
  const T x0 = f.pts[0][0], y0 = f.pts[0][1];
  const T x1 = f.pts[1][0], y1 = f.pts[1][1];
  const T x2 = f.pts[2][0], y2 = f.pts[2][1];
  const T m1 = x1 * y2 - x2 * y1;
  const T m2 = x0 * y2 - x2 * y0;
  const T m3 = x0 * y1 - x1 * y0;
  const T r0 = x0 * x0 + y0 * y0;
  const T r1 = x1 * x1 + y1 * y1;
  const T r2 = x2 * x2 + y2 * y2;
  return {m1 - m2 + m3, r0 * m1 - r1 * m2 + r2 * m3};
}

// alpha as a polynomial in the unknowns; rho = r^2 * inv_rsq is the
// conditioned radial coefficient
template <typename T>
Poly<T> alpha_poly(const std::array<T, 2>& pt, const T& inv_rsq,
                   const std::optional<T>& fixed_lambda) {
  const T r2 = pt[0] * pt[0] + pt[1] * pt[1];
  Poly<T> a;
  if (fixed_lambda) {
    // unknowns (l1, l2) in slots 0, 1
    a.terms = {{mono(0, 0), T(1) + *fixed_lambda * r2},
               {mono(1, 0), pt[0]},
               {mono(0, 1), pt[1]}};
  } else {
    // unknowns (lambda, l1, l2)
    a.terms = {{mono(0, 0, 0), T(1)},
               {mono(0, 1, 0), pt[0]},
               {mono(0, 0, 1), pt[1]},
               {mono(1, 0, 0), r2 * inv_rsq}};
  }
  a.normalize();
  return a;
}

template <typename T>
Poly<T> pair_constraint_t(const FrameT<T>& fi, const FrameT<T>& fj,
                          const T& inv_rsq,
                          const std::optional<T>& fixed_lambda) {
  const auto ci = frame_consts(fi);
  const auto cj = frame_consts(fj);
  Poly<T> num_i, num_j;
  if (fixed_lambda) {
    num_i.terms = {{mono(0, 0), ci.d + *fixed_lambda * ci.e}};
    num_j.terms = {{mono(0, 0), cj.d + *fixed_lambda * cj.e}};
  } else {
    num_i.terms = {{mono(0, 0, 0), ci.d}, {mono(1, 0, 0), ci.e * inv_rsq}};
    num_j.terms = {{mono(0, 0, 0), cj.d}, {mono(1, 0, 0), cj.e * inv_rsq}};
  }
  Poly<T> prod_i = poly_mul(
      poly_mul(alpha_poly(fi.pts[0], inv_rsq, fixed_lambda),
               alpha_poly(fi.pts[1], inv_rsq, fixed_lambda)),
      alpha_poly(fi.pts[2], inv_rsq, fixed_lambda));
  Poly<T> prod_j = poly_mul(
      poly_mul(alpha_poly(fj.pts[0], inv_rsq, fixed_lambda),
               alpha_poly(fj.pts[1], inv_rsq, fixed_lambda)),
      alpha_poly(fj.pts[2], inv_rsq, fixed_lambda));
  return poly_sub(poly_mul(num_i, prod_j), poly_mul(num_j, prod_i));
}

template <typename T>
std::vector<Poly<T>> build_equations(
    Configuration config, const std::vector<FrameT<T>>& frames,
    const T& inv_rsq, const std::optional<T>& fixed_lambda,
    const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Poly<T>> eqs;
  eqs.reserve(pairs.size());
  for (const auto& [i, j] : pairs)
    eqs.push_back(pair_constraint_t(frames[size_t(i)], frames[size_t(j)],
                                    inv_rsq, fixed_lambda));
  (void)config;
  return eqs;
}

}  // namespace radrect::detail
