#pragma once

#include <Eigen/Core>

namespace radrect {

// Homogeneous image point. Working convention throughout the library:
// coordinates are centered on the distortion center and scaled by
// 1/(width+height); pixel I/O converts at the boundary.
using Point2H = Eigen::Vector3d;

// One-parameter division model. `lambda` is expressed in normalized image
// units; the feasible range for estimation is [-8, 0.5].
struct DivisionModel {
  double lambda = 0.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

// Vanishing line restricted to the affine chart l3 = 1.
struct VanishingLine {
  double l1 = 0.0;
  double l2 = 0.0;

  Eigen::Vector3d homogeneous() const { return {l1, l2, 1.0}; }
};

// Joint rectification estimate: vanishing line plus division model.
struct RectifyModel {
  VanishingLine line;
  DivisionModel distortion;
};

inline constexpr double kLambdaFeasibleMin = -8.0;
inline constexpr double kLambdaFeasibleMax = 0.5;

inline bool lambda_feasible(double lambda) {
  return lambda >= kLambdaFeasibleMin && lambda <= kLambdaFeasibleMax;
}

// Affine frame: ordered point triple (y-point, origin, x-point) with unit
// homogeneous coordinate, stored as columns of a 2x3 matrix.
struct AffineFrame {
  Eigen::Matrix<double, 2, 3> pts = Eigen::Matrix<double, 2, 3>::Zero();

  Eigen::Vector2d point(int k) const { return pts.col(k); }

  // determinant of the 3x3 point matrix (third row of ones)
  double det() const {
    const auto& p = pts;
    return p(0, 0) * (p(1, 1) - p(1, 2)) - p(0, 1) * (p(1, 0) - p(1, 2)) +
           p(0, 2) * (p(1, 0) - p(1, 1));
  }
};

enum class Configuration { c222, c32, c4, c22_fixed };

inline int frames_required(Configuration c) {
  switch (c) {
    case Configuration::c222: return 6;
    case Configuration::c32: return 5;
    case Configuration::c4: return 4;
    case Configuration::c22_fixed: return 4;
  }
  return 0;
}

// repeat-group sizes of a minimal sample
inline std::vector<int> group_sizes(Configuration c) {
  switch (c) {
    case Configuration::c222: return {2, 2, 2};
    case Configuration::c32: return {3, 2};
    case Configuration::c4: return {4};
    case Configuration::c22_fixed: return {2, 2};
  }
  return {};
}

const char* config_name(Configuration c);

inline const char* config_name(Configuration c) {
  switch (c) {
    case Configuration::c222: return "222";
    case Configuration::c32: return "32";
    case Configuration::c4: return "4";
    case Configuration::c22_fixed: return "22";
  }
  return "?";
}

}  // namespace radrect
