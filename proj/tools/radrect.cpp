// radrect command-line driver: template generation, synthetic scenes,
// single-sample solving, robust estimation, benchmark studies and point
// rectification.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "radrect/errors.hpp"
#include "radrect/frame_io.hpp"
#include "radrect/geometry.hpp"
#include "radrect/ransac.hpp"
#include "radrect/studies.hpp"
#include "radrect/template_gen.hpp"

namespace {

using namespace radrect;
using nlohmann::json;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::wrong_sample_size: return 2;
    case ErrorCode::degenerate_sample:
    case ErrorCode::rank_deficient_template:
    case ErrorCode::degenerate_alpha:
    case ErrorCode::collinear_frame: return 3;
    case ErrorCode::no_valid_model: return 4;
    case ErrorCode::insufficient_data: return 5;
    case ErrorCode::infeasible_basis: return 6;
    case ErrorCode::io_error: return 7;
    case ErrorCode::bad_arguments: return 8;
    default: return 9;
  }
}

Configuration parse_config(const std::string& s) {
  if (s == "222") return Configuration::c222;
  if (s == "32") return Configuration::c32;
  if (s == "4") return Configuration::c4;
  if (s == "22") return Configuration::c22_fixed;
  throw Error(ErrorCode::bad_arguments, "unknown config '" + s + "'");
}

MotionType parse_motion(const std::string& s) {
  if (s == "ct") return MotionType::conjugate_translation;
  if (s == "rigid") return MotionType::rigid;
  throw Error(ErrorCode::bad_arguments, "unknown motion '" + s + "'");
}

std::string default_template_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("RR_TEMPLATE_DIR")) return env;
  return {};
}

// template from explicit dir / RR_TEMPLATE_DIR, falling back to the slower
// in-process default construction
const SolverTemplate& resolve_template(Configuration config,
                                       const std::string& dir,
                                       TemplateSet& storage) {
  const std::string resolved = default_template_dir(dir);
  if (!resolved.empty()) {
    if (storage.by_config.empty()) storage = load_template_set(resolved);
    if (storage.has(config)) return storage.get(config);
    std::cerr << "note: no template for config " << config_name(config)
              << " in " << resolved << ", using built-in default\n";
  }
  return default_template(config);
}

// cluster-aware sample in file order: each group comes from the first cluster
// that still has enough frames
MinimalSample sample_from_file_order(const FrameSet& fs, Configuration config) {
  MinimalSample sample;
  sample.config = config;
  auto clusters = fs.clusters();
  std::vector<size_t> used(clusters.size(), 0);
  for (int need : group_sizes(config)) {
    bool placed = false;
    for (size_t c = 0; c < clusters.size() && !placed; ++c) {
      if (clusters[c].size() - used[c] < size_t(need)) continue;
      std::vector<AffineFrame> group;
      for (int k = 0; k < need; ++k)
        group.push_back(fs.frames[size_t(clusters[c][used[c] + size_t(k)])]);
      used[c] += size_t(need);
      sample.groups.push_back(std::move(group));
      placed = true;
    }
    if (!placed)
      throw Error(ErrorCode::wrong_sample_size,
                  "file does not contain enough frames for the configuration");
  }
  return sample;
}

std::vector<ResultFile::Model> to_result_models(
    const std::vector<ModelCandidate>& candidates) {
  std::vector<ResultFile::Model> out;
  for (const auto& c : candidates)
    out.push_back({c.model, c.residual, c.feasible, c.origin_line_flag});
  return out;
}

int cmd_gen_templates(const std::string& out_dir, int candidates, int tests,
                      uint64_t seed, const std::vector<std::string>& configs) {
  std::filesystem::create_directories(out_dir);
  // fail early on unwritable output
  {
    const auto probe = std::filesystem::path(out_dir) / ".write_probe";
    std::ofstream f(probe);
    if (!f) throw Error(ErrorCode::io_error, "output dir not writable: " + out_dir);
    f.close();
    std::filesystem::remove(probe);
  }
  json report;
  report["format"] = "radrect-selection-report";
  report["candidates"] = candidates;
  report["tests"] = tests;
  report["seed"] = seed;
  for (const auto& cname : configs) {
    const Configuration config = parse_config(cname);
    std::cerr << "analyzing configuration " << cname << "...\n";
    const SystemShape shape = analyze_shape(config);
    SelectionReport rep;
    SolverTemplate best = sample_and_select(shape, candidates, tests, &rep, seed);
    const auto path =
        std::filesystem::path(out_dir) / template_filename(config);
    save_template(best, path.string());
    json entries = json::array();
    for (const auto& e : rep.entries)
      entries.push_back({{"seed", e.seed},
                         {"feasible", e.feasible},
                         {"median_residual", e.median_residual}});
    report["configs"][cname] = {
        {"file", template_filename(config)},
        {"num_solutions", best.num_solutions},
        {"degree", best.degree},
        {"rows", best.rows()},
        {"cols", best.cols()},
        {"selected_seed", rep.selected_seed},
        {"selected_median_residual", rep.selected_median},
        {"default_median_residual", rep.default_median},
        {"entries", std::move(entries)}};
    std::cerr << "  " << cname << ": " << best.num_solutions << " solutions, "
              << best.rows() << "x" << best.cols() << ", selected seed "
              << rep.selected_seed << " (median residual "
              << rep.selected_median << ", default " << rep.default_median
              << ")\n";
  }
  std::ofstream rf(std::filesystem::path(out_dir) / "selection_report.json");
  rf << report.dump(1) << "\n";
  return 0;
}

int cmd_gen_scene(const std::string& out, uint64_t seed,
                  const std::string& motion, std::optional<double> lambda,
                  double sigma, int clusters, int frames_per_cluster,
                  bool fronto, int width, int height) {
  SceneParams p;
  p.motion = parse_motion(motion);
  p.lambda = lambda;
  p.clusters = clusters;
  p.frames_per_cluster = frames_per_cluster;
  p.force_fronto_parallel = fronto;
  p.width = width;
  p.height = height;
  Rng rng(seed);
  SyntheticScene scene = gen_scene(rng, p);
  if (sigma > 0.0) {
    Rng noise_rng = rng.fork(1);
    scene.frames = add_noise(scene.frames, sigma, noise_rng);
  }
  save_frame_file(frame_file_from_scene(scene), out);
  std::cout << "wrote " << out << " (" << scene.frames.frames.size()
            << " frames, lambda* = " << scene.gt.model.distortion.lambda
            << ")\n";
  return 0;
}

int cmd_solve(const std::string& frames_path, const std::string& config_name_,
              std::optional<double> fixed_lambda, const std::string& tdir,
              const std::string& out) {
  const Configuration config = parse_config(config_name_);
  if (config == Configuration::c22_fixed && !fixed_lambda)
    throw Error(ErrorCode::bad_arguments, "--config 22 requires --lambda");
  FrameFileData data = load_frame_file(frames_path);
  TemplateSet storage;
  const SolverTemplate& tmpl = resolve_template(config, tdir, storage);
  MinimalSample sample = sample_from_file_order(data.frames, config);
  auto candidates = solve_minimal(sample, tmpl, fixed_lambda);

  ResultFile rf;
  rf.command = "solve";
  rf.width = data.width;
  rf.height = data.height;
  rf.models = to_result_models(candidates);
  if (!out.empty()) save_result_file(rf, out);
  for (const auto& c : candidates) {
    if (!c.feasible) continue;
    std::printf("lambda=% .12g l=(% .12g, % .12g) residual=%.3g%s\n",
                c.model.distortion.lambda, c.model.line.l1, c.model.line.l2,
                c.residual, c.origin_line_flag ? " [origin-line]" : "");
  }
  return 0;
}

int cmd_ransac(const std::string& frames_path, const std::string& config_name_,
               int iterations, uint64_t seed, double tau, bool lo,
               bool benchmark, std::optional<double> fixed_lambda,
               const std::string& tdir, const std::string& out) {
  const Configuration config = parse_config(config_name_);
  FrameFileData data = load_frame_file(frames_path);
  TemplateSet storage;
  const SolverTemplate& tmpl = resolve_template(config, tdir, storage);
  RansacConfig rc;
  rc.config = config;
  rc.iterations = iterations;
  rc.seed = seed;
  rc.tau_s = tau;
  rc.local_opt = lo;
  rc.fixed_lambda = fixed_lambda;
  rc.score_mode = benchmark ? ScoreMode::warp_gt : ScoreMode::consensus;
  Estimate est = estimate(data.frames, rc, tmpl);

  ResultFile rf;
  rf.command = "ransac";
  rf.width = data.width;
  rf.height = data.height;
  rf.models.push_back({est.model, 0.0, lambda_feasible(est.model.distortion.lambda), false});
  rf.score = est.score;
  rf.inliers = est.inliers;
  rf.iteration_found = est.iteration_found;
  if (est.refinement.attempted) rf.refinement = est.refinement;
  if (!out.empty()) save_result_file(rf, out);
  std::printf("lambda=% .12g l=(% .12g, % .12g) score=%.6g inliers=%zu iter=%d\n",
              est.model.distortion.lambda, est.model.line.l1, est.model.line.l2,
              est.score, est.inliers.size(), est.iteration_found);
  return 0;
}

int cmd_bench(const std::string& study, int scenes,
              const std::vector<double>& sigmas, const std::string& motion,
              uint64_t seed, const std::vector<std::string>& solvers,
              int iterations, double fixed_lambda, const std::string& tdir,
              const std::string& out, bool stable_output, int threads) {
  const StudyTag tag = study_tag_from_name(study);
  StudyParams p;
  p.scenes = scenes;
  p.sigmas = sigmas;
  p.motion = parse_motion(motion);
  p.seed = seed;
  p.ransac_iterations = iterations;
  p.fixed_lambda = fixed_lambda;
  p.threads = threads;
  p.solvers.clear();
  for (const auto& s : solvers) p.solvers.push_back(parse_config(s));

  TemplateSet storage;
  TemplateSet sampled;
  for (Configuration c : p.solvers) {
    const std::string dir = default_template_dir(tdir);
    sampled.by_config.emplace(c, resolve_template(c, tdir, storage));
  }
  p.templates = &sampled;

  TemplateSet defaults;
  if (tag == StudyTag::stability) {
    for (Configuration c : p.solvers)
      defaults.by_config.emplace(c, default_template(c));
    p.default_templates = &defaults;
  }
  StudyResult result = run_study(tag, p);
  write_csv(result, out, stable_output);
  std::cout << "wrote " << out << " (" << result.records.size() << " rows)\n";
  return 0;
}

int cmd_rectify_points(const std::string& frames_path,
                       const std::string& model_path,
                       std::optional<double> lambda, std::optional<double> l1,
                       std::optional<double> l2, const std::string& out) {
  FrameFileData data = load_frame_file(frames_path);
  RectifyModel model;
  if (!model_path.empty()) {
    model = load_model_from_result(model_path);
  } else if (lambda && l1 && l2) {
    model.distortion.lambda = *lambda;
    model.line = {*l1, *l2};
  } else {
    throw Error(ErrorCode::bad_arguments,
                "need --model or all of --lambda/--l1/--l2");
  }
  ResultFile rf;
  rf.command = "rectify-points";
  rf.width = data.width;
  rf.height = data.height;
  rf.models.push_back({model, 0.0, lambda_feasible(model.distortion.lambda), false});
  int flagged = 0;
  for (const auto& f : data.frames.frames)
    for (int k = 0; k < 3; ++k) {
      const Point2H r = rectify_point(Point2H(f.pts(0, k), f.pts(1, k), 1.0), model);
      ResultFile::PointRow row;
      if (std::abs(r.z()) < kTolAlpha) {
        row.ok = false;
        ++flagged;
      } else {
        row.rectified = {r.x() / r.z(), r.y() / r.z()};
      }
      rf.points.push_back(row);
    }
  if (!out.empty()) save_result_file(rf, out);
  std::cout << rf.points.size() << " points rectified, " << flagged
            << " flagged degenerate\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint affine rectification and radial distortion from "
               "coplanar repeats"};
  app.require_subcommand(1);

  // gen-templates
  auto* gen_t = app.add_subcommand("gen-templates", "generate solver templates");
  std::string gt_out = "templates";
  int gt_candidates = 50, gt_tests = 50;
  uint64_t gt_seed = 0;
  std::vector<std::string> gt_configs = {"222", "32", "4", "22"};
  gen_t->add_option("--out", gt_out, "output directory");
  gen_t->add_option("--candidates", gt_candidates, "sampled bases per config");
  gen_t->add_option("--tests", gt_tests, "evaluation instances per candidate");
  gen_t->add_option("--seed", gt_seed, "sampling seed");
  gen_t->add_option("--configs", gt_configs, "configurations")->delimiter(',');

  // gen-scene
  auto* gen_s = app.add_subcommand("gen-scene", "generate a synthetic scene");
  std::string gs_out = "scene.json", gs_motion = "ct";
  uint64_t gs_seed = 0;
  double gs_sigma = 0.0;
  std::optional<double> gs_lambda;
  int gs_clusters = 5, gs_fpc = 4, gs_w = 1000, gs_h = 1000;
  bool gs_fronto = false;
  gen_s->add_option("--out", gs_out, "output frame file");
  gen_s->add_option("--seed", gs_seed, "rng seed");
  gen_s->add_option("--motion", gs_motion, "ct|rigid");
  gen_s->add_option("--lambda", gs_lambda, "ground-truth lambda (normalized)");
  gen_s->add_option("--sigma", gs_sigma, "noise sigma in pixels");
  gen_s->add_option("--clusters", gs_clusters, "number of repeat groups");
  gen_s->add_option("--frames-per-cluster", gs_fpc, "repeats per group");
  gen_s->add_flag("--fronto", gs_fronto, "force a fronto-parallel pose");
  gen_s->add_option("--width", gs_w, "image width in pixels");
  gen_s->add_option("--height", gs_h, "image height in pixels");

  // solve
  auto* sol = app.add_subcommand("solve", "solve one minimal sample from a frame file");
  std::string so_frames, so_config = "222", so_tdir, so_out;
  std::optional<double> so_lambda;
  sol->add_option("--frames", so_frames, "frame file")->required();
  sol->add_option("--config", so_config, "222|32|4|22");
  sol->add_option("--lambda", so_lambda, "fixed lambda for --config 22");
  sol->add_option("--templates", so_tdir, "template directory");
  sol->add_option("--out", so_out, "result file");

  // ransac
  auto* ran = app.add_subcommand("ransac", "robust estimation");
  std::string ra_frames, ra_config = "222", ra_tdir, ra_out;
  int ra_iters = 25;
  uint64_t ra_seed = 0;
  double ra_tau = 0.1;
  bool ra_lo = false, ra_benchmark = false;
  std::optional<double> ra_lambda;
  ran->add_option("--frames", ra_frames, "frame file")->required();
  ran->add_option("--config", ra_config, "222|32|4|22");
  ran->add_option("--iterations", ra_iters, "ransac iterations");
  ran->add_option("--seed", ra_seed, "rng seed");
  ran->add_option("--tau", ra_tau, "scale-consistency inlier threshold");
  ran->add_flag("--lo", ra_lo, "local optimization of the best model");
  ran->add_flag("--benchmark", ra_benchmark,
                "score by warp error against the file's ground truth");
  ran->add_option("--lambda", ra_lambda, "fixed lambda for --config 22");
  ran->add_option("--templates", ra_tdir, "template directory");
  ran->add_option("--out", ra_out, "result file");

  // bench
  auto* ben = app.add_subcommand("bench", "synthetic benchmark studies");
  std::string be_study = "sensitivity", be_motion = "ct", be_tdir,
              be_out = "bench.csv";
  int be_scenes = 1000, be_iters = 25, be_threads = 0;
  uint64_t be_seed = 0;
  double be_fixed_lambda = 0.0;
  std::vector<double> be_sigmas;
  std::vector<std::string> be_solvers = {"222", "32", "4"};
  bool be_stable = false;
  ben->add_option("--study", be_study, "stability|proposal|sensitivity|solutions");
  ben->add_option("--scenes", be_scenes, "number of scenes");
  ben->add_option("--sigma", be_sigmas, "noise levels in pixels")->delimiter(',');
  ben->add_option("--motion", be_motion, "ct|rigid");
  ben->add_option("--seed", be_seed, "rng seed");
  ben->add_option("--solvers", be_solvers, "solver configs")->delimiter(',');
  ben->add_option("--iterations", be_iters, "ransac iterations (sensitivity)");
  ben->add_option("--fixed-lambda", be_fixed_lambda, "lambda for the 22 solver");
  ben->add_option("--templates", be_tdir, "template directory");
  ben->add_option("--out", be_out, "output csv");
  ben->add_flag("--stable-output", be_stable,
                "zero runtime column for byte-identical output");
  ben->add_option("--threads", be_threads, "worker threads (0 = all)");

  // rectify-points
  auto* rec = app.add_subcommand("rectify-points", "apply a model to frame points");
  std::string rp_frames, rp_model, rp_out;
  std::optional<double> rp_lambda, rp_l1, rp_l2;
  rec->add_option("--frames", rp_frames, "frame file")->required();
  rec->add_option("--model", rp_model, "result file with the model");
  rec->add_option("--lambda", rp_lambda, "lambda (normalized)");
  rec->add_option("--l1", rp_l1, "vanishing line l1 (normalized)");
  rec->add_option("--l2", rp_l2, "vanishing line l2 (normalized)");
  rec->add_option("--out", rp_out, "result file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_t->parsed())
      return cmd_gen_templates(gt_out, gt_candidates, gt_tests, gt_seed, gt_configs);
    if (gen_s->parsed())
      return cmd_gen_scene(gs_out, gs_seed, gs_motion, gs_lambda, gs_sigma,
                           gs_clusters, gs_fpc, gs_fronto, gs_w, gs_h);
    if (sol->parsed())
      return cmd_solve(so_frames, so_config, so_lambda, so_tdir, so_out);
    if (ran->parsed())
      return cmd_ransac(ra_frames, ra_config, ra_iters, ra_seed, ra_tau, ra_lo,
                        ra_benchmark, ra_lambda, ra_tdir, ra_out);
    if (ben->parsed())
      return cmd_bench(be_study, be_scenes, be_sigmas, be_motion, be_seed,
                       be_solvers, be_iters, be_fixed_lambda, be_tdir, be_out,
                       be_stable, be_threads);
    if (rec->parsed())
      return cmd_rectify_points(rp_frames, rp_model, rp_lambda, rp_l1, rp_l2,
                                rp_out);
  } catch (const radrect::Error& e) {
    nlohmann::json err{{"error", {{"code", radrect::error_code_name(e.code())},
                                  {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 10;
  }
  return 0;
}
