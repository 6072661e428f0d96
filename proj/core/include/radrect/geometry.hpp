#pragma once

#include <optional>

#include "radrect/types.hpp"

namespace radrect {

inline constexpr double kTolAlpha = 1e-12;
inline constexpr double kTolCollinear = 1e-12;

// x = f(x~, lambda) = (x~, y~, 1 + lambda*(x~^2 + y~^2)).
// Input point must have w = 1; the distortion center is subtracted and
// restored around the radial term.
Point2H undistort_point(const Point2H& p, const DivisionModel& d);

// Inverse of the division model. Picks the root that is continuous at
// lambda -> 0, written in the cancellation-free denominator form. Empty when
// 1 - 4*lambda*r_u^2 < 0 (point outside the invertible domain).
std::optional<Point2H> distort_point(const Point2H& u, const DivisionModel& d);

// H*f(x~, lambda) with H = [I_2x2 0; l1 l2 1]; the unknowns appear only in
// the homogeneous coordinate.
Point2H rectify_point(const Point2H& p, const RectifyModel& m);

// third coordinate of rectify_point: l^T f(x~, lambda)
double alpha(const Point2H& p, const RectifyModel& m);

// Affine-rectified scale of a frame: det of the rectified point matrix
// divided by the product of the homogeneous coordinates. Throws
// degenerate_alpha when any |alpha| < kTolAlpha.
double rectified_scale(const AffineFrame& f, const RectifyModel& m);

// Reverses the point order of a left-handed frame so that the determinant of
// the point matrix is strictly positive. Throws collinear_frame.
AffineFrame orient_frame(const AffineFrame& f);

}  // namespace radrect
