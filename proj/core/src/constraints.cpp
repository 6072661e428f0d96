#include "radrect/constraints.hpp"

#include <cmath>

#include "radrect/constraints_detail.hpp"
#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"

namespace radrect {

namespace {

detail::FrameT<double> to_frame_t(const AffineFrame& f) {
  detail::FrameT<double> out;
  for (int k = 0; k < 3; ++k) out.pts[size_t(k)] = {f.pts(0, k), f.pts(1, k)};
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> constraint_pairs(Configuration c) {
  switch (c) {
    case Configuration::c222:
      return {{0, 1}, {2, 3}, {4, 5}};
    case Configuration::c32:
      return {{0, 1}, {0, 2}, {1, 2}, {3, 4}};
    case Configuration::c4:
      return {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    case Configuration::c22_fixed:
      return {{0, 1}, {2, 3}};
  }
  return {};
}

std::pair<std::vector<AffineFrame>, ScaleRecord> condition_frames(
    const std::vector<AffineFrame>& frames) {
  if (frames.empty())
    throw Error(ErrorCode::wrong_sample_size, "no frames to condition");
  double acc = 0.0;
  int n = 0;
  for (const auto& f : frames)
    for (int k = 0; k < 3; ++k) {
      acc += f.pts.col(k).norm();
      ++n;
    }
  const double coord_scale = acc / n;
  if (!(coord_scale > 1e-300))
    throw Error(ErrorCode::all_zero_coordinates, "all coordinates are zero");
  std::vector<AffineFrame> scaled = frames;
  double r2acc = 0.0;
  for (auto& f : scaled) {
    f.pts /= coord_scale;
    for (int k = 0; k < 3; ++k) r2acc += f.pts.col(k).squaredNorm();
  }
  const double rsq_scale = r2acc / n;
  return {std::move(scaled), ScaleRecord{coord_scale, rsq_scale}};
}

Poly<double> pair_constraint(const AffineFrame& fi, const AffineFrame& fj) {
  if (std::abs(fi.det()) < kTolCollinear || std::abs(fj.det()) < kTolCollinear)
    throw Error(ErrorCode::collinear_frame, "collinear frame in constraint");
  return detail::pair_constraint_t(to_frame_t(fi), to_frame_t(fj), 1.0,
                                   std::optional<double>{});
}

Eigen::Vector3d ConstraintSystem::unscale(const Eigen::Vector3d& z) const {
  const double cs = scales.coord_scale, rs = scales.rsq_scale;
  if (nvars == 2) {
    // z = (l1', l2', unused)
    return {fixed_lambda.value_or(0.0), z.x() / cs, z.y() / cs};
  }
  return {z.x() / (cs * cs * rs), z.y() / cs, z.z() / cs};
}

Eigen::Vector3d ConstraintSystem::to_conditioned(
    const Eigen::Vector3d& z) const {
  const double cs = scales.coord_scale, rs = scales.rsq_scale;
  if (nvars == 2) return {z.y() * cs, z.z() * cs, 0.0};
  return {z.x() * cs * cs * rs, z.y() * cs, z.z() * cs};
}

ConstraintSystem assemble(Configuration config,
                          const std::vector<AffineFrame>& frames,
                          const ScaleRecord& scales,
                          std::optional<double> fixed_lambda) {
  if (int(frames.size()) != frames_required(config))
    throw Error(ErrorCode::wrong_sample_size, "frame count does not match configuration");
  const bool fixed = (config == Configuration::c22_fixed);
  if (fixed && !fixed_lambda)
    throw Error(ErrorCode::bad_arguments, "c22_fixed requires a lambda value");

  ConstraintSystem sys;
  sys.config = config;
  sys.nvars = fixed ? 2 : 3;
  sys.scales = scales;
  sys.fixed_lambda = fixed ? fixed_lambda : std::nullopt;

  std::vector<detail::FrameT<double>> fts;
  fts.reserve(frames.size());
  for (const auto& f : frames) {
    if (std::abs(f.det()) < kTolCollinear)
      throw Error(ErrorCode::collinear_frame, "collinear frame in sample");
    fts.push_back(to_frame_t(f));
  }
  // With scaled coordinates the radial term of alpha is
  // lambda * r^2 = (lambda * coord_scale^2) * r'^2, so the substituted
  // fixed-lambda coefficient is lambda * coord_scale^2.
  std::optional<double> lam_cond;
  if (fixed)
    lam_cond = *fixed_lambda * scales.coord_scale * scales.coord_scale;
  sys.equations = detail::build_equations(
      config, fts, 1.0 / scales.rsq_scale, lam_cond, constraint_pairs(config));
  return sys;
}

double relative_residual(const Poly<double>& f, const Eigen::Vector3d& z) {
  const double zv[3] = {z.x(), z.y(), z.z()};
  double val = 0.0, mag = 1.0;
  for (const auto& [m, c] : f.terms) {
    double t = c;
    for (int v = 0; v < 3; ++v)
      for (int k = 0; k < m.e[v]; ++k) t *= zv[v];
    val += t;
    mag += std::abs(t);
  }
  return std::abs(val) / mag;
}

double system_residual(const ConstraintSystem& sys, const Eigen::Vector3d& z) {
  double worst = 0.0;
  for (const auto& f : sys.equations)
    worst = std::max(worst, relative_residual(f, z));
  return worst;
}

}  // namespace radrect
