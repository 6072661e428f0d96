#pragma once

#include <string>
#include <vector>

#include "radrect/ransac.hpp"
#include "radrect/solver_template.hpp"
#include "radrect/synthetic.hpp"

namespace radrect {

enum class StudyTag { stability, proposal, sensitivity, solutions };

StudyTag study_tag_from_name(const std::string& name);
const char* study_tag_name(StudyTag tag);

struct StudyParams {
  int scenes = 1000;
  std::vector<double> sigmas;  // defaults depend on the study
  MotionType motion = MotionType::conjugate_translation;
  uint64_t seed = 0;
  int ransac_iterations = 25;
  std::vector<Configuration> solvers = {Configuration::c222,
                                        Configuration::c32, Configuration::c4};
  const TemplateSet* templates = nullptr;          // required
  const TemplateSet* default_templates = nullptr;  // stability study baseline
  double fixed_lambda = 0.0;                       // for the c22 solver
  int threads = 0;
};

struct StudyRecord {
  int scene_id = 0;
  std::string solver;
  double sigma = 0.0;
  double warp_rms_px = std::numeric_limits<double>::quiet_NaN();
  double rel_lambda_err = std::numeric_limits<double>::quiet_NaN();
  int n_real = 0;
  int n_feasible = 0;
  double runtime_ms = 0.0;
};

struct StudyResult {
  StudyTag tag = StudyTag::stability;
  std::vector<StudyRecord> records;
};

// stability  -> per-scene log-ready relative lambda error of one noiseless
//               minimal sample, sampled templates plus "<solver>_glex" rows
//               for the default-basis baseline (no polishing)
// proposal   -> warp error of single-sample proposals at sigma (default 1 px),
//               lambda* = -4
// sensitivity-> RANSAC (benchmark scoring) warp and lambda errors per sigma,
//               lambda* = -4
// solutions  -> real/feasible solution counts on noiseless scenes
StudyResult run_study(StudyTag tag, const StudyParams& params);

// stable CSV: scene_id,solver,sigma,warp_rms_px,rel_lambda_err,n_real,
// n_feasible,runtime_ms. stable_output zeroes runtime_ms so identical
// flags+seed give byte-identical files.
void write_csv(const StudyResult& result, const std::string& path,
               bool stable_output);
std::string csv_string(const StudyResult& result, bool stable_output);

}  // namespace radrect
