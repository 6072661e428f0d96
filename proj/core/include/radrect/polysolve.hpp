#pragma once

#include <Eigen/Core>
#include <vector>

#include "radrect/constraints.hpp"
#include "radrect/solver_template.hpp"

namespace radrect {

struct SolveOptions {
  bool polish = true;      // damped Newton refinement on the input equations
  int newton_steps = 5;
  double tol_imag = 1e-6;  // |Im| > tol_imag*(1+|Re|) discards a solution
  double tol_res = 1e-6;   // drop solutions with larger relative residual
  double rank_tol = 1e-13; // pivot-ratio threshold for degeneracy detection
};

// One real solution of the conditioned system: (lambda, l1, l2), or
// (l1, l2, 0) when lambda is fixed.
struct Solution {
  Eigen::Vector3d z = Eigen::Vector3d::Zero();
  double residual = 0.0;
};

struct SolutionSet {
  std::vector<Solution> solutions;  // sorted by residual, deduplicated
  int num_complex_discarded = 0;
};

// Action-matrix solve: fills the template with the instance coefficients,
// eliminates, reads the action matrix off the quotient basis and
// eigendecomposes. Throws rank_deficient_template for degenerate data.
SolutionSet solve(const SolverTemplate& tmpl, const ConstraintSystem& sys,
                  const SolveOptions& opts = {});

}  // namespace radrect
