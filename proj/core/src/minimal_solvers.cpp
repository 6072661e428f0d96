#include "radrect/minimal_solvers.hpp"

#include <cmath>

#include "radrect/constraints.hpp"
#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"

namespace radrect {

std::vector<AffineFrame> MinimalSample::flattened() const {
  std::vector<AffineFrame> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

std::vector<DegeneracyFlag> check_degeneracy(const MinimalSample& sample) {
  std::vector<DegeneracyFlag> flags;
  bool collinear = false;
  for (const auto& g : sample.groups)
    for (const auto& f : g)
      if (std::abs(f.det()) < kTolCollinear) collinear = true;
  if (collinear) flags.push_back(DegeneracyFlag::collinear_frame);

  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& g : sample.groups)
    for (const auto& f : g)
      for (int k = 0; k < 3; ++k) {
        const double r = f.pts.col(k).norm();
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
  if (rmax - rmin < kTolRadius)
    flags.push_back(DegeneracyFlag::concentric_points);
  return flags;
}

std::vector<ModelCandidate> solve_minimal(const MinimalSample& sample,
                                          const SolverTemplate& tmpl,
                                          std::optional<double> fixed_lambda,
                                          const SolveOptions& opts) {
  const auto sizes = group_sizes(sample.config);
  if (sample.groups.size() != sizes.size())
    throw Error(ErrorCode::wrong_sample_size, "wrong number of repeat groups");
  for (size_t i = 0; i < sizes.size(); ++i)
    if (int(sample.groups[i].size()) != sizes[i])
      throw Error(ErrorCode::wrong_sample_size, "wrong group size");
  if (sample.config == Configuration::c22_fixed && !fixed_lambda)
    throw Error(ErrorCode::bad_arguments, "c22 needs a fixed lambda");

  std::vector<AffineFrame> frames = sample.flattened();
  try {
    for (auto& f : frames) f = orient_frame(f);
  } catch (const Error&) {
    throw Error(ErrorCode::degenerate_sample, "collinear frame in sample");
  }

  auto [scaled, scales] = condition_frames(frames);
  ConstraintSystem sys = assemble(sample.config, scaled, scales, fixed_lambda);

  SolutionSet sols;
  try {
    sols = solve(tmpl, sys, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::rank_deficient_template)
      throw Error(ErrorCode::degenerate_sample, "rank-deficient sample");
    throw;
  }

  std::vector<ModelCandidate> out;
  out.reserve(sols.solutions.size());
  for (const auto& s : sols.solutions) {
    const Eigen::Vector3d z = sys.unscale(s.z);
    ModelCandidate c;
    c.model.distortion.lambda = z.x();
    c.model.line = {z.y(), z.z()};
    c.residual = s.residual;
    c.origin_line_flag = std::hypot(z.y(), z.z()) > 1e4;
    c.feasible = lambda_feasible(z.x());
    out.push_back(c);
  }
  return out;
}

}  // namespace radrect
