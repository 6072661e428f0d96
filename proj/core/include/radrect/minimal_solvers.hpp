#pragma once

#include <optional>
#include <vector>

#include "radrect/polysolve.hpp"
#include "radrect/types.hpp"

namespace radrect {

// A minimal sample: groups of frames asserted to be repeats of one another.
// Group sizes per configuration: 222 -> {2,2,2}, 32 -> {3,2}, 4 -> {4},
// 22 (fixed lambda) -> {2,2}.
struct MinimalSample {
  Configuration config = Configuration::c222;
  std::vector<std::vector<AffineFrame>> groups;

  std::vector<AffineFrame> flattened() const;
};

struct ModelCandidate {
  RectifyModel model;
  double residual = 0.0;
  bool feasible = false;          // lambda within [-8, 0.5] normalized
  bool origin_line_flag = false;  // |l| blew up: chart shadow of l3 = 0
};

enum class DegeneracyFlag {
  collinear_frame,
  concentric_points,  // all sample points near one circle around the center
};

inline constexpr double kTolRadius = 1e-3;

// Advisory pre-solve degeneracy screening. The vanishing-line-through-origin
// case cannot be tested before solving in the l3 = 1 chart; it is flagged on
// candidates instead (origin_line_flag).
std::vector<DegeneracyFlag> check_degeneracy(const MinimalSample& sample);

// Full minimal-solver pipeline: orient -> condition -> assemble -> solve ->
// unscale -> feasibility flag, sorted by residual. Throws wrong_sample_size
// and degenerate_sample.
std::vector<ModelCandidate> solve_minimal(
    const MinimalSample& sample, const SolverTemplate& tmpl,
    std::optional<double> fixed_lambda = std::nullopt,
    const SolveOptions& opts = {});

}  // namespace radrect
