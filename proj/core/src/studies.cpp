#include "radrect/studies.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "radrect/errors.hpp"
#include "radrect/parallel.hpp"

namespace radrect {

StudyTag study_tag_from_name(const std::string& name) {
  if (name == "stability") return StudyTag::stability;
  if (name == "proposal") return StudyTag::proposal;
  if (name == "sensitivity") return StudyTag::sensitivity;
  if (name == "solutions") return StudyTag::solutions;
  throw Error(ErrorCode::bad_arguments, "unknown study '" + name + "'");
}

const char* study_tag_name(StudyTag tag) {
  switch (tag) {
    case StudyTag::stability: return "stability";
    case StudyTag::proposal: return "proposal";
    case StudyTag::sensitivity: return "sensitivity";
    case StudyTag::solutions: return "solutions";
  }
  return "?";
}

namespace {

struct SolverRow {
  std::string name;
  Configuration config;
  const SolverTemplate* tmpl;
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

double rel_lambda_error(double est, double truth) {
  return std::abs(est - truth) / std::max(std::abs(truth), 1e-300);
}

}  // namespace

StudyResult run_study(StudyTag tag, const StudyParams& params) {
  if (!params.templates)
    throw Error(ErrorCode::bad_arguments, "run_study needs templates");

  std::vector<SolverRow> rows;
  for (Configuration c : params.solvers) {
    rows.push_back({config_name(c), c, &params.templates->get(c)});
    if (tag == StudyTag::stability && params.default_templates &&
        params.default_templates->has(c))
      rows.push_back({std::string(config_name(c)) + "_glex", c,
                      &params.default_templates->get(c)});
  }

  std::vector<double> sigmas = params.sigmas;
  if (sigmas.empty()) {
    switch (tag) {
      case StudyTag::stability:
      case StudyTag::solutions: sigmas = {0.0}; break;
      case StudyTag::proposal: sigmas = {1.0}; break;
      case StudyTag::sensitivity: sigmas = {0.1, 0.5, 1.0, 2.0, 5.0}; break;
    }
  }

  const bool fixed_gt_lambda =
      tag == StudyTag::proposal || tag == StudyTag::sensitivity;
  const int per_scene = int(sigmas.size()) * int(rows.size());

  StudyResult result;
  result.tag = tag;
  result.records.resize(size_t(params.scenes) * size_t(per_scene));

  parallel_for(params.scenes, [&](int scene_id) {
    Rng scene_rng = Rng(params.seed).fork(uint64_t(scene_id));
    SceneParams sp;
    sp.motion = params.motion;
    if (fixed_gt_lambda) sp.lambda = -4.0;
    SyntheticScene scene = gen_scene(scene_rng, sp);
    const double lambda_gt = scene.gt.model.distortion.lambda;

    for (int si = 0; si < int(sigmas.size()); ++si) {
      FrameSet noisy = scene.frames;
      if (sigmas[size_t(si)] > 0.0) {
        Rng noise_rng = scene_rng.fork(1000 + uint64_t(si));
        noisy = add_noise(scene.frames, sigmas[size_t(si)], noise_rng);
      }
      for (int ri = 0; ri < int(rows.size()); ++ri) {
        const SolverRow& row = rows[size_t(ri)];
        StudyRecord rec;
        rec.scene_id = scene_id;
        rec.solver = row.name;
        rec.sigma = sigmas[size_t(si)];
        const std::optional<double> fixed_lam =
            row.config == Configuration::c22_fixed
                ? std::optional<double>(params.fixed_lambda)
                : std::nullopt;

        if (tag == StudyTag::sensitivity) {
          RansacConfig rc;
          rc.config = row.config;
          rc.iterations = params.ransac_iterations;
          rc.score_mode = ScoreMode::warp_gt;
          rc.fixed_lambda = fixed_lam;
          Rng seed_rng = scene_rng.fork(3000 + uint64_t(si) * 64 + uint64_t(ri));
          rc.seed = seed_rng.bits();
          const auto t0 = std::chrono::steady_clock::now();
          try {
            Estimate est = estimate(noisy, rc, *row.tmpl);
            rec.warp_rms_px = est.score;
            rec.rel_lambda_err =
                rel_lambda_error(est.model.distortion.lambda, lambda_gt);
          } catch (const Error&) {
            rec.warp_rms_px = std::numeric_limits<double>::infinity();
            rec.rel_lambda_err = std::numeric_limits<double>::infinity();
          }
          rec.runtime_ms = elapsed_ms(t0);
        } else {
          // single-sample studies
          Rng draw_rng = scene_rng.fork(2000 + uint64_t(si) * 64 + uint64_t(ri));
          SolveOptions opts;
          opts.tol_res = std::numeric_limits<double>::infinity();
          // stability and solution counting look at the raw solver output
          opts.polish = tag == StudyTag::proposal;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            MinimalSample sample = draw_sample(noisy, row.config, draw_rng);
            auto candidates = solve_minimal(sample, *row.tmpl, fixed_lam, opts);
            rec.runtime_ms = elapsed_ms(t0);
            rec.n_real = int(candidates.size());
            for (const auto& c : candidates)
              if (c.feasible) ++rec.n_feasible;
            if (tag == StudyTag::proposal) {
              double best_warp = std::numeric_limits<double>::infinity();
              double best_rel = std::numeric_limits<double>::quiet_NaN();
              for (const auto& c : candidates) {
                if (!c.feasible || c.origin_line_flag) continue;
                const double w = warp_error(c.model, scene.gt).rms_px;
                if (w < best_warp) {
                  best_warp = w;
                  best_rel =
                      rel_lambda_error(c.model.distortion.lambda, lambda_gt);
                }
              }
              rec.warp_rms_px = best_warp;
              rec.rel_lambda_err = best_rel;
            } else {
              double best = std::numeric_limits<double>::infinity();
              for (const auto& c : candidates)
                best = std::min(best, rel_lambda_error(
                                          c.model.distortion.lambda, lambda_gt));
              rec.rel_lambda_err = best;
            }
          } catch (const Error&) {
            rec.runtime_ms = elapsed_ms(t0);
            rec.rel_lambda_err = std::numeric_limits<double>::infinity();
            if (tag == StudyTag::proposal)
              rec.warp_rms_px = std::numeric_limits<double>::infinity();
          }
        }
        result.records[size_t(scene_id) * size_t(per_scene) +
                       size_t(si) * rows.size() + size_t(ri)] = std::move(rec);
      }
    }
  }, params.threads);
  return result;
}

std::string csv_string(const StudyResult& result, bool stable_output) {
  std::string out =
      "scene_id,solver,sigma,warp_rms_px,rel_lambda_err,n_real,n_feasible,"
      "runtime_ms\n";
  char buf[256];
  for (const auto& r : result.records) {
    const double rt = stable_output ? 0.0 : r.runtime_ms;
    std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%.17g,%d,%d,%.17g\n",
                  r.scene_id, r.solver.c_str(), r.sigma, r.warp_rms_px,
                  r.rel_lambda_err, r.n_real, r.n_feasible, rt);
    out += buf;
  }
  return out;
}

void write_csv(const StudyResult& result, const std::string& path,
               bool stable_output) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << csv_string(result, stable_output);
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path);
}

}  // namespace radrect
