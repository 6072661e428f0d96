#include "radrect/geometry.hpp"

#include <cmath>

#include "radrect/errors.hpp"

namespace radrect {

Point2H undistort_point(const Point2H& p, const DivisionModel& d) {
  const double x = p.x() - d.center.x();
  const double y = p.y() - d.center.y();
  return {x, y, 1.0 + d.lambda * (x * x + y * y)};
}

std::optional<Point2H> distort_point(const Point2H& u, const DivisionModel& d) {
  if (u.z() == 0.0) return std::nullopt;
  const double ux = u.x() / u.z() - d.center.x();
  const double uy = u.y() / u.z() - d.center.y();
  const double ru2 = ux * ux + uy * uy;
  const double disc = 1.0 - 4.0 * d.lambda * ru2;
  if (disc < 0.0) return std::nullopt;
  // r_d = 2*r_u / (1 + sqrt(1 - 4*lambda*r_u^2)); at lambda = 0 this is r_u
  const double s = 2.0 / (1.0 + std::sqrt(disc));
  return Point2H{ux * s + d.center.x(), uy * s + d.center.y(), 1.0};
}

Point2H rectify_point(const Point2H& p, const RectifyModel& m) {
  const double x = p.x() - m.distortion.center.x();
  const double y = p.y() - m.distortion.center.y();
  const double a =
      m.line.l1 * x + m.line.l2 * y + 1.0 + m.distortion.lambda * (x * x + y * y);
  return {x, y, a};
}

double alpha(const Point2H& p, const RectifyModel& m) {
  return rectify_point(p, m).z();
}

double rectified_scale(const AffineFrame& f, const RectifyModel& m) {
  Eigen::Matrix<double, 2, 3> p = f.pts;
  p.colwise() -= m.distortion.center;
  double a[3];
  for (int k = 0; k < 3; ++k) {
    const double x = p(0, k), y = p(1, k);
    a[k] = m.line.l1 * x + m.line.l2 * y + 1.0 +
           m.distortion.lambda * (x * x + y * y);
    if (std::abs(a[k]) < kTolAlpha)
      throw Error(ErrorCode::degenerate_alpha, "frame point maps to infinity");
  }
  // (3,k) minors of the [x; y] rows
  const double m1 = p(0, 1) * p(1, 2) - p(0, 2) * p(1, 1);
  const double m2 = p(0, 0) * p(1, 2) - p(0, 2) * p(1, 0);
  const double m3 = p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
  return (a[0] * m1 - a[1] * m2 + a[2] * m3) / (a[0] * a[1] * a[2]);
}

AffineFrame orient_frame(const AffineFrame& f) {
  const double det = f.det();
  if (std::abs(det) < kTolCollinear)
    throw Error(ErrorCode::collinear_frame, "frame points are collinear");
  if (det > 0.0) return f;
  AffineFrame r;
  r.pts.col(0) = f.pts.col(2);
  r.pts.col(1) = f.pts.col(1);
  r.pts.col(2) = f.pts.col(0);
  return r;
}

}  // namespace radrect
