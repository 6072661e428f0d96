#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "radrect/rng.hpp"
#include "radrect/types.hpp"

namespace radrect {

enum class MotionType { conjugate_translation, rigid };

// Ground-truth handle carried by benchmark frame sets: the true model, the
// plane-to-image homography of the pinhole camera and the plane region the
// repeats (and the warp grid) live on.
struct GroundTruth {
  RectifyModel model;
  Eigen::Matrix3d plane_to_image = Eigen::Matrix3d::Identity();
  double plane_span = 1.0;
  int width = 1000, height = 1000;

  double pixel_scale() const { return 1.0 / (width + height); }
};

struct FrameSet {
  std::vector<AffineFrame> frames;  // distorted, normalized centered coords
  std::vector<int> cluster_ids;     // parallel to frames
  std::optional<GroundTruth> gt;    // benchmark mode only

  int n_clusters() const;
  std::vector<std::vector<int>> clusters() const;  // frame ids per cluster
};

struct SyntheticScene {
  Eigen::Matrix<double, 3, 4> camera = Eigen::Matrix<double, 3, 4>::Zero();
  GroundTruth gt;
  FrameSet frames;
  MotionType motion = MotionType::conjugate_translation;
};

struct SceneParams {
  MotionType motion = MotionType::conjugate_translation;
  std::optional<double> lambda;  // ground truth; default U[-8, 0.5]
  int clusters = 5;
  int frames_per_cluster = 4;
  bool force_fronto_parallel = false;
  int width = 1000, height = 1000;
};

// Random but realistic camera viewing a plane of coplanar repeats, imaged
// through the division model. Retries poses internally until at least 90% of
// the frame points land inside the image; throws retry_exhausted after 100
// attempts.
SyntheticScene gen_scene(Rng& rng, const SceneParams& params = {});

// i.i.d. zero-mean Gaussian pixel noise on every frame point
FrameSet add_noise(const FrameSet& fs, double sigma_px, Rng& rng);

struct WarpErrorReport {
  double rms_px = 0.0;
  Eigen::Matrix<double, 2, 3> affine = Eigen::Matrix<double, 2, 3>::Zero();
  std::vector<double> residuals_px;
  int excluded = 0;  // grid points outside the invertible domain
};

// Round-trip RMS error of a hypothesized rectification against the ground
// truth camera over a 10x10 plane grid, minimized over the affine ambiguity
// (linear fit + short damped Gauss-Newton refinement).
WarpErrorReport warp_error(const RectifyModel& model, const GroundTruth& gt);

// general-homography form: rectified points are dehom(h_rect * f(x, lambda));
// pre-composing h_rect with any invertible affine map leaves the error
// unchanged (absorbed by the fitted ambiguity)
WarpErrorReport warp_error(const Eigen::Matrix3d& h_rect, double lambda,
                           const GroundTruth& gt);

}  // namespace radrect
