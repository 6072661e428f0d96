#include "radrect/ransac.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"

namespace radrect {

MinimalSample draw_sample(const FrameSet& fs, Configuration config, Rng& rng) {
  MinimalSample sample;
  sample.config = config;
  auto clusters = fs.clusters();
  std::vector<std::vector<int>> avail = clusters;

  for (int need : group_sizes(config)) {
    // clusters that can still supply `need` frames, weighted by what is left
    std::vector<int> eligible;
    double total = 0.0;
    for (int c = 0; c < int(avail.size()); ++c)
      if (int(avail[size_t(c)].size()) >= need) {
        eligible.push_back(c);
        total += double(avail[size_t(c)].size());
      }
    if (eligible.empty())
      throw Error(ErrorCode::insufficient_data,
                  "no cluster can supply the requested group");
    double pick = rng.uniform01() * total;
    int chosen = eligible.back();
    for (int c : eligible) {
      pick -= double(avail[size_t(c)].size());
      if (pick <= 0.0) {
        chosen = c;
        break;
      }
    }
    auto& pool = avail[size_t(chosen)];
    std::vector<AffineFrame> group;
    for (int k = 0; k < need; ++k) {
      const size_t j = k + size_t(rng.uniform_int(pool.size() - size_t(k)));
      std::swap(pool[size_t(k)], pool[j]);
      group.push_back(fs.frames[size_t(pool[size_t(k)])]);
    }
    pool.erase(pool.begin(), pool.begin() + need);
    sample.groups.push_back(std::move(group));
  }
  return sample;
}

ConsensusResult consensus(const FrameSet& fs, const RectifyModel& model,
                          double tau_s) {
  ConsensusResult out;
  std::vector<char> is_inlier(fs.frames.size(), 0);
  for (const auto& cluster : fs.clusters()) {
    if (cluster.size() < 2) continue;
    std::vector<std::pair<int, double>> scales;
    for (int idx : cluster) {
      try {
        scales.emplace_back(idx, rectified_scale(fs.frames[size_t(idx)], model));
      } catch (const Error&) {
        ++out.degenerate_frames;
      }
    }
    int consistent = 0;
    for (size_t a = 0; a < scales.size(); ++a)
      for (size_t b = a + 1; b < scales.size(); ++b) {
        const double si = scales[a].second, sj = scales[b].second;
        const double denom = std::max(std::abs(si), std::abs(sj));
        if (denom > 0.0 && std::abs(si - sj) / denom < tau_s) {
          ++consistent;
          is_inlier[size_t(scales[a].first)] = 1;
          is_inlier[size_t(scales[b].first)] = 1;
        }
      }
    const double pairs = 0.5 * double(cluster.size()) * double(cluster.size() - 1);
    out.score += double(consistent) / pairs;
  }
  for (int i = 0; i < int(fs.frames.size()); ++i)
    if (is_inlier[size_t(i)]) out.inliers.push_back(i);
  return out;
}

namespace {

struct LogScaleProblem {
  // per-frame quantities entering s = (d + lambda e) / (a1 a2 a3)
  struct FrameData {
    double d, e;
    Eigen::Matrix<double, 2, 3> pts;
  };
  std::vector<FrameData> frames;               // indexed like inlier list
  std::vector<std::pair<int, int>> pairs;      // indices into `frames`

  static std::optional<LogScaleProblem> build(const FrameSet& fs,
                                              const std::vector<int>& inliers) {
    LogScaleProblem p;
    std::vector<int> local_of(fs.frames.size(), -1);
    for (int idx : inliers) {
      const auto& f = fs.frames[size_t(idx)];
      FrameData fd;
      fd.pts = f.pts;
      const auto& q = f.pts;
      const double m1 = q(0, 1) * q(1, 2) - q(0, 2) * q(1, 1);
      const double m2 = q(0, 0) * q(1, 2) - q(0, 2) * q(1, 0);
      const double m3 = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
      fd.d = m1 - m2 + m3;
      const double r0 = q.col(0).squaredNorm(), r1 = q.col(1).squaredNorm(),
                   r2 = q.col(2).squaredNorm();
      fd.e = r0 * m1 - r1 * m2 + r2 * m3;
      local_of[size_t(idx)] = int(p.frames.size());
      p.frames.push_back(fd);
    }
    for (const auto& cluster : fs.clusters()) {
      std::vector<int> members;
      for (int idx : cluster)
        if (local_of[size_t(idx)] >= 0) members.push_back(local_of[size_t(idx)]);
      for (size_t a = 0; a < members.size(); ++a)
        for (size_t b = a + 1; b < members.size(); ++b)
          p.pairs.emplace_back(members[a], members[b]);
    }
    if (p.pairs.empty()) return std::nullopt;
    return p;
  }

  // log|s_i| and its gradient in (lambda, l1, l2)
  bool log_scale(const FrameData& f, const Eigen::Vector3d& th, double& val,
                 Eigen::Vector3d& grad) const {
    const double num = f.d + th.x() * f.e;
    if (std::abs(num) < 1e-300) return false;
    val = std::log(std::abs(num));
    grad = {f.e / num, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      const double x = f.pts(0, k), y = f.pts(1, k), r2 = x * x + y * y;
      const double a = 1.0 + th.y() * x + th.z() * y + th.x() * r2;
      if (std::abs(a) < kTolAlpha) return false;
      val -= std::log(std::abs(a));
      grad -= Eigen::Vector3d(r2, x, y) / a;
    }
    return true;
  }

  bool residuals(const Eigen::Vector3d& th, Eigen::VectorXd& r,
                 Eigen::MatrixXd* jac) const {
    std::vector<double> vals(frames.size());
    std::vector<Eigen::Vector3d> grads(frames.size());
    for (size_t i = 0; i < frames.size(); ++i)
      if (!log_scale(frames[i], th, vals[i], grads[i])) return false;
    r.resize(int(pairs.size()));
    if (jac) jac->resize(int(pairs.size()), 3);
    for (int k = 0; k < int(pairs.size()); ++k) {
      const auto& [i, j] = pairs[size_t(k)];
      r(k) = vals[size_t(i)] - vals[size_t(j)];
      if (jac) jac->row(k) = (grads[size_t(i)] - grads[size_t(j)]).transpose();
    }
    return true;
  }
};

}  // namespace

double local_opt_objective(const RectifyModel& model, const FrameSet& fs,
                           const std::vector<int>& inliers) {
  auto prob = LogScaleProblem::build(fs, inliers);
  if (!prob) return 0.0;
  Eigen::VectorXd r;
  const Eigen::Vector3d th(model.distortion.lambda, model.line.l1, model.line.l2);
  if (!prob->residuals(th, r, nullptr))
    return std::numeric_limits<double>::infinity();
  return r.squaredNorm();
}

Eigen::Vector3d local_opt_gradient(const RectifyModel& model,
                                   const FrameSet& fs,
                                   const std::vector<int>& inliers) {
  auto prob = LogScaleProblem::build(fs, inliers);
  if (!prob) return Eigen::Vector3d::Zero();
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  const Eigen::Vector3d th(model.distortion.lambda, model.line.l1,
                           model.line.l2);
  if (!prob->residuals(th, r, &jac))
    return Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
  return 2.0 * jac.transpose() * r;
}

RectifyModel local_optimize(const RectifyModel& model, const FrameSet& fs,
                            const std::vector<int>& inliers,
                            RefinementReport* report) {
  RefinementReport rep;
  rep.attempted = true;
  auto prob = LogScaleProblem::build(fs, inliers);
  if (!prob) {
    if (report) *report = rep;
    return model;
  }
  Eigen::Vector3d th(model.distortion.lambda, model.line.l1, model.line.l2);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  if (!prob->residuals(th, r, &jac)) {
    if (report) *report = rep;
    return model;
  }
  double obj = r.squaredNorm();
  rep.initial_objective = obj;

  // Levenberg-Marquardt with multiplicative damping
  double mu = 1e-6 * (jac.transpose() * jac).diagonal().maxCoeff();
  if (!(mu > 0.0)) mu = 1e-9;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;
    bool stepped = false;
    for (int inner = 0; inner < 8; ++inner) {
      Eigen::Matrix3d a = jtj;
      a.diagonal().array() += mu;
      const Eigen::Vector3d delta = a.ldlt().solve(-jtr);
      Eigen::VectorXd rt;
      Eigen::MatrixXd jt;
      const Eigen::Vector3d tht = th + delta;
      if (prob->residuals(tht, rt, &jt) && rt.squaredNorm() < obj) {
        th = tht;
        r = rt;
        jac = jt;
        obj = rt.squaredNorm();
        mu = std::max(mu / 3.0, 1e-16);
        stepped = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped || obj < 1e-28) break;
  }
  rep.final_objective = obj;
  rep.accepted = obj <= rep.initial_objective;
  if (report) *report = rep;
  if (!rep.accepted) return model;
  RectifyModel out = model;
  out.distortion.lambda = th.x();
  out.line = {th.y(), th.z()};
  return out;
}

Estimate estimate(const FrameSet& fs, const RansacConfig& cfg,
                  const SolverTemplate& tmpl) {
  if (cfg.iterations < 1)
    throw Error(ErrorCode::bad_arguments, "need at least one iteration");
  const bool benchmark = cfg.score_mode == ScoreMode::warp_gt;
  if (benchmark && !fs.gt)
    throw Error(ErrorCode::bad_arguments,
                "benchmark scoring needs ground truth");

  Rng master(cfg.seed);
  Estimate best;
  bool found = false;
  auto better = [&](double cand, double cur) {
    return benchmark ? cand < cur : cand > cur;
  };

  for (int it = 0; it < cfg.iterations; ++it) {
    Rng iter_rng = master.fork(uint64_t(it));
    MinimalSample sample = draw_sample(fs, cfg.config, iter_rng);
    std::vector<ModelCandidate> candidates;
    try {
      candidates =
          solve_minimal(sample, tmpl, cfg.fixed_lambda, cfg.solve_options);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::degenerate_sample) continue;
      throw;
    }
    for (const auto& cand : candidates) {
      if (!cand.feasible || cand.origin_line_flag) continue;
      double score;
      std::vector<int> inliers;
      if (benchmark) {
        score = warp_error(cand.model, *fs.gt).rms_px;
        if (!std::isfinite(score)) continue;
      } else {
        ConsensusResult c = consensus(fs, cand.model, cfg.tau_s);
        score = c.score;
        inliers = std::move(c.inliers);
      }
      if (!found || better(score, best.score)) {
        best.model = cand.model;
        best.score = score;
        best.inliers = std::move(inliers);
        best.iteration_found = it;
        found = true;
      }
    }
  }
  if (!found)
    throw Error(ErrorCode::no_valid_model,
                "no feasible model in any iteration");

  if (benchmark) best.inliers = consensus(fs, best.model, cfg.tau_s).inliers;
  if (cfg.local_opt) {
    std::vector<int> support = best.inliers;
    if (int(support.size()) >= frames_required(cfg.config)) {
      RectifyModel refined =
          local_optimize(best.model, fs, support, &best.refinement);
      if (best.refinement.accepted && lambda_feasible(refined.distortion.lambda)) {
        if (benchmark) {
          const double w = warp_error(refined, *fs.gt).rms_px;
          if (w <= best.score) {
            best.model = refined;
            best.score = w;
            best.inliers = consensus(fs, refined, cfg.tau_s).inliers;
          }
        } else {
          ConsensusResult c = consensus(fs, refined, cfg.tau_s);
          if (c.score >= best.score) {
            best.model = refined;
            best.score = c.score;
            best.inliers = std::move(c.inliers);
          }
        }
      }
    }
  }
  return best;
}

}  // namespace radrect
