#include "radrect/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"

namespace radrect {

int FrameSet::n_clusters() const {
  int n = 0;
  for (int c : cluster_ids) n = std::max(n, c + 1);
  return n;
}

std::vector<std::vector<int>> FrameSet::clusters() const {
  std::vector<std::vector<int>> out;
  out.resize(size_t(n_clusters()));
  for (int i = 0; i < int(frames.size()); ++i)
    out[size_t(cluster_ids[size_t(i)])].push_back(i);
  return out;
}

namespace {

Eigen::Matrix3d look_at_rotation(const Eigen::Vector3d& center, double roll) {
  // camera looks at the plane origin; z_cam points from the center to it
  const Eigen::Vector3d z = (-center).normalized();
  Eigen::Vector3d up(std::sin(roll), std::cos(roll), 0.0);
  Eigen::Vector3d x = up.cross(z);
  if (x.norm() < 1e-9) x = Eigen::Vector3d(1, 0, 0);
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  return r;
}

}  // namespace

SyntheticScene gen_scene(Rng& rng, const SceneParams& params) {
  const double norm_scale = 1.0 / (params.width + params.height);
  const double half_w = 0.5 * params.width * norm_scale;
  const double half_h = 0.5 * params.height * norm_scale;
  const double span = 1.0;

  const double lambda_gt =
      params.lambda ? *params.lambda
                    : rng.uniform(kLambdaFeasibleMin, kLambdaFeasibleMax);

  for (int attempt = 0; attempt < 100; ++attempt) {
    // camera with a random but realistic focal length
    const double f = rng.uniform(0.5, 2.5) * params.width * norm_scale;
    Eigen::Matrix3d rot;
    Eigen::Vector3d cam_center;
    if (params.force_fronto_parallel) {
      rot = Eigen::Matrix3d::Identity();
      cam_center = {0.0, 0.0, -f * span / 0.45};
    } else {
      const double tilt = rng.uniform(0.05, 0.785);  // up to ~45 deg obliquity
      const double azim = rng.uniform(0.0, 6.283185307179586);
      const double dist = f * span / rng.uniform(0.35, 0.55);
      cam_center = dist * Eigen::Vector3d(std::sin(tilt) * std::cos(azim),
                                          std::sin(tilt) * std::sin(azim),
                                          -std::cos(tilt));
      rot = look_at_rotation(cam_center, rng.uniform(0.0, 6.283185307179586));
    }
    Eigen::Matrix3d intr = Eigen::Matrix3d::Identity();
    intr(0, 0) = intr(1, 1) = f;
    Eigen::Matrix<double, 3, 4> cam;
    cam.leftCols<3>() = rot;
    cam.col(3) = -rot * cam_center;
    cam = intr * cam;

    Eigen::Matrix3d h;  // plane (X, Y, 1) -> pinhole image
    h.col(0) = cam.col(0);
    h.col(1) = cam.col(1);
    h.col(2) = cam.col(3);
    if (std::abs(h.determinant()) < 1e-12) continue;

    // vanishing line of the plane: join of the two imaged directions
    const Eigen::Vector3d line = h.col(0).cross(h.col(1));
    if (std::abs(line.z()) < 1e-8 * line.norm()) continue;  // through origin

    SyntheticScene scene;
    scene.camera = cam;
    scene.motion = params.motion;
    scene.gt.model.distortion.lambda = lambda_gt;
    scene.gt.model.line = {line.x() / line.z(), line.y() / line.z()};
    scene.gt.plane_to_image = h;
    scene.gt.plane_span = span;
    scene.gt.width = params.width;
    scene.gt.height = params.height;

    // repeats: per cluster one base triangle, copied by plane motions
    const double margin = 0.12 * span;
    bool ok = true;
    int inside = 0, total = 0;
    for (int c = 0; c < params.clusters && ok; ++c) {
      const double leg1 = rng.uniform(0.04, 0.09) * span;
      const double leg2 = rng.uniform(0.04, 0.09) * span;
      const double open = rng.uniform(1.047, 2.094);  // 60..120 deg
      const double base_th = rng.uniform(0.0, 6.283185307179586);
      const Eigen::Vector2d xdir(std::cos(base_th), std::sin(base_th));
      const Eigen::Vector2d ydir(std::cos(base_th + open), std::sin(base_th + open));
      Eigen::Matrix<double, 2, 3> base;
      base.col(0) = leg1 * ydir;  // y-point
      base.col(1) = Eigen::Vector2d::Zero();
      base.col(2) = leg2 * xdir;  // x-point

      for (int k = 0; k < params.frames_per_cluster && ok; ++k) {
        const double th = params.motion == MotionType::rigid
                              ? rng.uniform(0.0, 6.283185307179586)
                              : 0.0;
        Eigen::Matrix2d rot2;
        rot2 << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const Eigen::Vector2d t(
            rng.uniform(-0.5 * span + margin, 0.5 * span - margin),
            rng.uniform(-0.5 * span + margin, 0.5 * span - margin));
        AffineFrame img;
        for (int i = 0; i < 3 && ok; ++i) {
          const Eigen::Vector2d plane_pt = rot2 * base.col(i) + t;
          const Eigen::Vector3d pin =
              h * Eigen::Vector3d(plane_pt.x(), plane_pt.y(), 1.0);
          if (std::abs(pin.z()) < 1e-12) {
            ok = false;
            break;
          }
          const auto dist_pt = distort_point(
              Point2H(pin.x() / pin.z(), pin.y() / pin.z(), 1.0),
              scene.gt.model.distortion);
          if (!dist_pt) {
            ok = false;
            break;
          }
          img.pts.col(i) = dist_pt->head<2>();
          ++total;
          if (std::abs(dist_pt->x()) <= half_w && std::abs(dist_pt->y()) <= half_h)
            ++inside;
        }
        if (!ok) break;
        scene.frames.frames.push_back(img);
        scene.frames.cluster_ids.push_back(c);
      }
    }
    if (!ok) continue;
    if (inside < int(std::ceil(0.9 * total))) continue;  // mostly in view
    scene.frames.gt = scene.gt;
    return scene;
  }
  throw Error(ErrorCode::retry_exhausted, "no visible scene after 100 tries");
}

FrameSet add_noise(const FrameSet& fs, double sigma_px, Rng& rng) {
  FrameSet out = fs;
  if (sigma_px <= 0.0) return out;
  const double s = sigma_px * (fs.gt ? fs.gt->pixel_scale() : 1.0 / 2000.0);
  for (auto& f : out.frames)
    for (int k = 0; k < 3; ++k) {
      f.pts(0, k) += s * rng.normal();
      f.pts(1, k) += s * rng.normal();
    }
  return out;
}

namespace {

// residuals of the full round trip for a given affine ambiguity; false when
// a re-imaged point leaves the invertible domain of the distortion
bool roundtrip_residuals(const Eigen::Matrix<double, 2, 3>& affine,
                         const std::vector<Eigen::Vector2d>& rect_pts,
                         const std::vector<Eigen::Vector2d>& image_pts,
                         const GroundTruth& gt, Eigen::VectorXd& out) {
  const Eigen::Matrix3d& h = gt.plane_to_image;
  out.resize(2 * int(rect_pts.size()));
  for (int i = 0; i < int(rect_pts.size()); ++i) {
    const Eigen::Vector2d v = rect_pts[size_t(i)];
    const Eigen::Vector2d plane = affine.leftCols<2>() * v + affine.col(2);
    const Eigen::Vector3d pin = h * Eigen::Vector3d(plane.x(), plane.y(), 1.0);
    if (std::abs(pin.z()) < 1e-14) return false;
    const auto d = distort_point(
        Point2H(pin.x() / pin.z(), pin.y() / pin.z(), 1.0), gt.model.distortion);
    if (!d) return false;
    out(2 * i) = d->x() - image_pts[size_t(i)].x();
    out(2 * i + 1) = d->y() - image_pts[size_t(i)].y();
  }
  return true;
}

}  // namespace

WarpErrorReport warp_error(const RectifyModel& model, const GroundTruth& gt) {
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  h.row(2) << model.line.l1, model.line.l2, 1.0;
  return warp_error(h, model.distortion.lambda, gt);
}

WarpErrorReport warp_error(const Eigen::Matrix3d& h_rect, double lambda,
                           const GroundTruth& gt) {
  WarpErrorReport report;
  const double s = gt.plane_span;
  std::vector<Eigen::Vector2d> plane_pts, image_pts, rect_pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Eigen::Vector2d x(-0.5 * s + s * i / 9.0, -0.5 * s + s * j / 9.0);
      const Eigen::Vector3d pin =
          gt.plane_to_image * Eigen::Vector3d(x.x(), x.y(), 1.0);
      if (std::abs(pin.z()) < 1e-14) {
        ++report.excluded;
        continue;
      }
      const auto d = distort_point(
          Point2H(pin.x() / pin.z(), pin.y() / pin.z(), 1.0), gt.model.distortion);
      if (!d) {
        ++report.excluded;  // outside the invertible domain of the gt model
        continue;
      }
      DivisionModel hyp;
      hyp.lambda = lambda;
      const Point2H rect = h_rect * undistort_point(*d, hyp);
      if (std::abs(rect.z()) < 1e-12 * rect.norm() || !rect.allFinite()) {
        ++report.excluded;
        continue;
      }
      plane_pts.push_back(x);
      image_pts.push_back(d->head<2>());
      rect_pts.emplace_back(rect.x() / rect.z(), rect.y() / rect.z());
    }
  if (int(plane_pts.size()) < 50) {
    report.rms_px = std::numeric_limits<double>::infinity();
    return report;
  }
  const int n = int(plane_pts.size());

  // linear initialization: affine map from estimated-rectified points to the
  // ground-truth plane coordinates
  Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(2 * n, 6);
  Eigen::VectorXd b_vec(2 * n);
  for (int i = 0; i < n; ++i) {
    a_mat.block<1, 3>(2 * i, 0) << rect_pts[size_t(i)].x(),
        rect_pts[size_t(i)].y(), 1.0;
    a_mat.block<1, 3>(2 * i + 1, 3) << rect_pts[size_t(i)].x(),
        rect_pts[size_t(i)].y(), 1.0;
    b_vec(2 * i) = plane_pts[size_t(i)].x();
    b_vec(2 * i + 1) = plane_pts[size_t(i)].y();
  }
  const Eigen::Matrix<double, 6, 1> theta =
      a_mat.colPivHouseholderQr().solve(b_vec);
  Eigen::Matrix<double, 2, 3> affine;
  affine << theta(0), theta(1), theta(2), theta(3), theta(4), theta(5);

  Eigen::VectorXd res;
  if (!roundtrip_residuals(affine, rect_pts, image_pts, gt, res)) {
    report.rms_px = std::numeric_limits<double>::infinity();
    return report;
  }
  double best = res.squaredNorm();

  // short damped Gauss-Newton on the full round trip, numeric Jacobian;
  // the linear fit stands when refinement cannot improve it
  for (int it = 0; it < 10; ++it) {
    Eigen::MatrixXd jac(2 * n, 6);
    for (int p = 0; p < 6; ++p) {
      Eigen::Matrix<double, 2, 3> ap = affine;
      const double hstep = 1e-7 * (1.0 + std::abs(ap(p / 3, p % 3)));
      ap(p / 3, p % 3) += hstep;
      Eigen::VectorXd rp;
      if (!roundtrip_residuals(ap, rect_pts, image_pts, gt, rp)) {
        jac.col(p).setZero();
        continue;
      }
      jac.col(p) = (rp - res) / hstep;
    }
    const Eigen::Matrix<double, 6, 1> delta =
        jac.colPivHouseholderQr().solve(-res);
    double step = 1.0;
    bool improved = false;
    for (int hh = 0; hh < 5; ++hh) {
      Eigen::Matrix<double, 2, 3> at = affine;
      for (int p = 0; p < 6; ++p) at(p / 3, p % 3) += step * delta(p);
      Eigen::VectorXd rt;
      if (roundtrip_residuals(at, rect_pts, image_pts, gt, rt) &&
          rt.squaredNorm() < best) {
        affine = at;
        res = rt;
        best = rt.squaredNorm();
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || best < 1e-30) break;
  }

  const double px = 1.0 / gt.pixel_scale();
  report.affine = affine;
  report.rms_px = std::sqrt(best / n) * px;
  report.residuals_px.reserve(size_t(n));
  for (int i = 0; i < n; ++i)
    report.residuals_px.push_back(std::hypot(res(2 * i), res(2 * i + 1)) * px);
  if (!std::isfinite(report.rms_px))
    report.rms_px = std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace radrect
