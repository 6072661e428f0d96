#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radrect/minimal_solvers.hpp"
#include "radrect/ransac.hpp"
#include "radrect/synthetic.hpp"

namespace radrect {

// Frame files store pixel coordinates (canonical for ingestion) with the
// normalization convention in the header: scale 1/(width+height), center at
// the image center. In-memory frames are normalized and centered.
struct FrameFileData {
  int width = 1000, height = 1000;
  FrameSet frames;

  double pixel_scale() const { return 1.0 / (width + height); }
};

Eigen::Vector2d pixel_to_norm(const Eigen::Vector2d& px, int w, int h);
Eigen::Vector2d norm_to_pixel(const Eigen::Vector2d& nrm, int w, int h);

void save_frame_file(const FrameFileData& data, const std::string& path);
FrameFileData load_frame_file(const std::string& path);
FrameFileData frame_file_from_scene(const SyntheticScene& scene);

// model conversion between normalized and pixel conventions:
// lambda_px = lambda_n * s^2, l_px = l_n * s with s = 1/(width+height)
RectifyModel model_to_pixel_convention(const RectifyModel& m, int w, int h);

struct ResultFile {
  std::string command;
  int width = 1000, height = 1000;

  struct Model {
    RectifyModel model;  // normalized convention
    double residual = 0.0;
    bool feasible = false;
    bool origin_line_flag = false;
  };
  std::vector<Model> models;

  // ransac extras
  std::optional<double> score;
  std::vector<int> inliers;
  int iteration_found = -1;
  std::optional<RefinementReport> refinement;

  // rectify-points rows
  struct PointRow {
    Eigen::Vector2d rectified = Eigen::Vector2d::Zero();
    bool ok = true;  // false: degenerate alpha, point maps to infinity
  };
  std::vector<PointRow> points;
};

void save_result_file(const ResultFile& r, const std::string& path);

// reads back the first (best) model of a result file, normalized convention
RectifyModel load_model_from_result(const std::string& path);

}  // namespace radrect
