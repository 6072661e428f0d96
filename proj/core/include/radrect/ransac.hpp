#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "radrect/minimal_solvers.hpp"
#include "radrect/synthetic.hpp"

namespace radrect {

enum class ScoreMode {
  consensus,  // scale-consistency pair counting (standard mode)
  warp_gt,    // RMS warp error against the ground truth (benchmark mode)
};

struct RansacConfig {
  Configuration config = Configuration::c222;
  int iterations = 25;
  double tau_s = 0.1;  // inlier threshold on the scale-consistency residual
  bool local_opt = false;
  uint64_t seed = 0;
  std::optional<double> fixed_lambda;  // c22 only
  ScoreMode score_mode = ScoreMode::consensus;
  SolveOptions solve_options = [] {
    SolveOptions o;
    // noisy overdetermined systems have no exact roots; keep all candidates
    // and let scoring decide
    o.tol_res = std::numeric_limits<double>::infinity();
    return o;
  }();
};

struct ConsensusResult {
  std::vector<int> inliers;
  double score = 0.0;
  int degenerate_frames = 0;  // frames whose alpha vanished under the model
};

struct RefinementReport {
  bool attempted = false;
  bool accepted = false;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

struct Estimate {
  RectifyModel model;
  std::vector<int> inliers;
  double score = 0.0;  // consensus score, or warp RMS in benchmark mode
  int iteration_found = -1;
  RefinementReport refinement;
};

// Cluster-aware minimal sampling: clusters are chosen with probability
// proportional to their (remaining) size among those that can still supply
// the requested group, frames drawn without replacement.
MinimalSample draw_sample(const FrameSet& fs, Configuration config, Rng& rng);

// Pairwise scale-consistency consensus: within each cluster, a frame pair is
// consistent when |s_i - s_j| / max(|s_i|, |s_j|) < tau_s; the score sums the
// consistent-pair fraction per cluster.
ConsensusResult consensus(const FrameSet& fs, const RectifyModel& model,
                          double tau_s);

// Nonlinear least squares over (lambda, l1, l2) on pairwise log-scale
// residuals of the inlier frames. Never returns a model with a larger
// objective than the input.
RectifyModel local_optimize(const RectifyModel& model, const FrameSet& fs,
                            const std::vector<int>& inliers,
                            RefinementReport* report = nullptr);

double local_opt_objective(const RectifyModel& model, const FrameSet& fs,
                           const std::vector<int>& inliers);

// analytic gradient of the objective in (lambda, l1, l2), as used by the
// optimizer internally
Eigen::Vector3d local_opt_gradient(const RectifyModel& model,
                                   const FrameSet& fs,
                                   const std::vector<int>& inliers);

// Robust estimation loop: sample, solve, filter by feasibility, score, keep
// the best; optional local optimization of the winner. Throws
// insufficient_data and no_valid_model.
Estimate estimate(const FrameSet& fs, const RansacConfig& cfg,
                  const SolverTemplate& tmpl);

}  // namespace radrect
