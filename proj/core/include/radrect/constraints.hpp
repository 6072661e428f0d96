#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "radrect/polynomial.hpp"
#include "radrect/types.hpp"

namespace radrect {

// rescale factors applied before assembling a system (coordinates divided by
// coord_scale, squared radii additionally divided by rsq_scale)
struct ScaleRecord {
  double coord_scale = 1.0;
  double rsq_scale = 1.0;
};

// frame pairs whose equal-scale equations enter each configuration
std::vector<std::pair<int, int>> constraint_pairs(Configuration c);

// Divides all coordinates by their average magnitude (mean point norm).
// Throws all_zero_coordinates.
std::pair<std::vector<AffineFrame>, ScaleRecord> condition_frames(
    const std::vector<AffineFrame>& frames);

// Equal-scale equation of one frame pair, expanded in (lambda, l1, l2):
//   num_i(lambda) * a_j1*a_j2*a_j3 - num_j(lambda) * a_i1*a_i2*a_i3
// of degree 4. Frames must be oriented (positive determinant).
Poly<double> pair_constraint(const AffineFrame& fi, const AffineFrame& fj);

struct ConstraintSystem {
  Configuration config = Configuration::c222;
  int nvars = 3;  // 3: (lambda,l1,l2); 2: (l1,l2) with lambda fixed
  std::vector<Poly<double>> equations;
  ScaleRecord scales;
  std::optional<double> fixed_lambda;  // original units, when nvars == 2

  // map a solution of the conditioned system back to original units;
  // input/output layout (lambda, l1, l2)
  Eigen::Vector3d unscale(const Eigen::Vector3d& z) const;
  // forward map, used by tests to evaluate residuals at a known truth
  Eigen::Vector3d to_conditioned(const Eigen::Vector3d& z) const;
};

// Assembles the constraint system for conditioned, oriented frames.
// C222 -> 3 equations, C32 -> 4, C4 -> 6, C22_fixed -> 2 (degree 3).
// `fixed_lambda` is given in original (unconditioned) units.
ConstraintSystem assemble(Configuration config,
                          const std::vector<AffineFrame>& frames,
                          const ScaleRecord& scales,
                          std::optional<double> fixed_lambda = std::nullopt);

// relative residual of one equation at z: |f(z)| / (1 + sum_m |c_m z^m|)
double relative_residual(const Poly<double>& f, const Eigen::Vector3d& z);

// largest relative residual over all equations
double system_residual(const ConstraintSystem& sys, const Eigen::Vector3d& z);

}  // namespace radrect
