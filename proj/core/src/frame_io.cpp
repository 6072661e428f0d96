#include "radrect/frame_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "radrect/errors.hpp"

namespace radrect {

namespace {

using nlohmann::json;

json model_json(const RectifyModel& m, int w, int h) {
  const RectifyModel px = model_to_pixel_convention(m, w, h);
  return json{{"lambda_norm", m.distortion.lambda},
              {"line_norm", {m.line.l1, m.line.l2}},
              {"lambda_px", px.distortion.lambda},
              {"line_px", {px.line.l1, px.line.l2}}};
}

}  // namespace

Eigen::Vector2d pixel_to_norm(const Eigen::Vector2d& px, int w, int h) {
  return {(px.x() - 0.5 * w) / (w + h), (px.y() - 0.5 * h) / (w + h)};
}

Eigen::Vector2d norm_to_pixel(const Eigen::Vector2d& nrm, int w, int h) {
  return {nrm.x() * (w + h) + 0.5 * w, nrm.y() * (w + h) + 0.5 * h};
}

RectifyModel model_to_pixel_convention(const RectifyModel& m, int w, int h) {
  const double s = 1.0 / (w + h);
  RectifyModel out = m;
  out.distortion.lambda = m.distortion.lambda * s * s;
  out.distortion.center = {0.5 * w, 0.5 * h};
  out.line = {m.line.l1 * s, m.line.l2 * s};
  return out;
}

void save_frame_file(const FrameFileData& data, const std::string& path) {
  json j;
  j["format"] = "radrect-frames";
  j["version"] = 1;
  j["image"] = {{"width", data.width}, {"height", data.height}};
  j["convention"] = {{"scale", "1/(width+height)"},
                     {"center", "image_center"},
                     {"point_order", {"y", "o", "x"}}};
  json frames = json::array();
  for (size_t i = 0; i < data.frames.frames.size(); ++i) {
    const auto& f = data.frames.frames[i];
    json pts = json::array();
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d px =
          norm_to_pixel(f.pts.col(k), data.width, data.height);
      pts.push_back({px.x(), px.y()});
    }
    frames.push_back({{"cluster", data.frames.cluster_ids[i]},
                      {"points", std::move(pts)}});
  }
  j["frames"] = std::move(frames);
  if (data.frames.gt) {
    const auto& gt = *data.frames.gt;
    json h = json::array();
    for (int r = 0; r < 3; ++r)
      h.push_back({gt.plane_to_image(r, 0), gt.plane_to_image(r, 1),
                   gt.plane_to_image(r, 2)});
    j["ground_truth"] = {{"lambda_norm", gt.model.distortion.lambda},
                         {"line_norm", {gt.model.line.l1, gt.model.line.l2}},
                         {"plane_to_image", std::move(h)},
                         {"plane_span", gt.plane_span}};
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path);
}

FrameFileData load_frame_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("bad frame json: ") + e.what());
  }
  if (j.value("format", "") != "radrect-frames" || j.value("version", 0) != 1)
    throw Error(ErrorCode::io_error, "unsupported frame file " + path);

  FrameFileData data;
  data.width = j.at("image").at("width").get<int>();
  data.height = j.at("image").at("height").get<int>();
  if (data.width <= 0 || data.height <= 0)
    throw Error(ErrorCode::io_error, "bad image size in " + path);
  for (const auto& fj : j.at("frames")) {
    AffineFrame f;
    const auto& pts = fj.at("points");
    if (pts.size() != 3)
      throw Error(ErrorCode::io_error, "frame needs exactly 3 points");
    for (int k = 0; k < 3; ++k) {
      const double x = pts.at(size_t(k)).at(0).get<double>();
      const double y = pts.at(size_t(k)).at(1).get<double>();
      if (!std::isfinite(x) || !std::isfinite(y))
        throw Error(ErrorCode::io_error, "non-finite frame point");
      f.pts.col(k) = pixel_to_norm({x, y}, data.width, data.height);
    }
    data.frames.frames.push_back(f);
    data.frames.cluster_ids.push_back(fj.at("cluster").get<int>());
  }
  // cluster ids must be contiguous starting at 0
  const int n_clusters = data.frames.n_clusters();
  std::vector<char> seen(size_t(std::max(n_clusters, 1)), 0);
  for (int c : data.frames.cluster_ids) {
    if (c < 0) throw Error(ErrorCode::io_error, "negative cluster id");
    seen[size_t(c)] = 1;
  }
  for (int c = 0; c < n_clusters; ++c)
    if (!seen[size_t(c)])
      throw Error(ErrorCode::io_error, "cluster ids are not contiguous");

  if (j.contains("ground_truth")) {
    const auto& g = j.at("ground_truth");
    GroundTruth gt;
    gt.width = data.width;
    gt.height = data.height;
    gt.model.distortion.lambda = g.at("lambda_norm").get<double>();
    gt.model.line = {g.at("line_norm").at(0).get<double>(),
                     g.at("line_norm").at(1).get<double>()};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        gt.plane_to_image(r, c) = g.at("plane_to_image").at(size_t(r)).at(size_t(c)).get<double>();
    gt.plane_span = g.at("plane_span").get<double>();
    data.frames.gt = gt;
  }
  return data;
}

FrameFileData frame_file_from_scene(const SyntheticScene& scene) {
  FrameFileData data;
  data.width = scene.gt.width;
  data.height = scene.gt.height;
  data.frames = scene.frames;
  return data;
}

void save_result_file(const ResultFile& r, const std::string& path) {
  json j;
  j["format"] = "radrect-result";
  j["version"] = 1;
  j["command"] = r.command;
  j["image"] = {{"width", r.width}, {"height", r.height}};
  json models = json::array();
  for (const auto& m : r.models) {
    json mj = model_json(m.model, r.width, r.height);
    mj["residual"] = m.residual;
    mj["feasible"] = m.feasible;
    mj["origin_line_flag"] = m.origin_line_flag;
    models.push_back(std::move(mj));
  }
  j["models"] = std::move(models);
  if (r.score) {
    j["ransac"] = {{"score", *r.score},
                   {"inliers", r.inliers},
                   {"iteration_found", r.iteration_found}};
    if (r.refinement)
      j["ransac"]["local_optimization"] = {
          {"attempted", r.refinement->attempted},
          {"accepted", r.refinement->accepted},
          {"initial_objective", r.refinement->initial_objective},
          {"final_objective", r.refinement->final_objective}};
  }
  if (!r.points.empty()) {
    json pts = json::array();
    for (const auto& p : r.points) {
      if (p.ok)
        pts.push_back({{"rectified", {p.rectified.x(), p.rectified.y()}},
                       {"status", "ok"}});
      else
        pts.push_back({{"status", "degenerate_alpha"}});
    }
    j["points"] = std::move(pts);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << j.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path);
}

RectifyModel load_model_from_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("bad result json: ") + e.what());
  }
  if (j.value("format", "") != "radrect-result" || j.at("models").empty())
    throw Error(ErrorCode::io_error, "no models in " + path);
  const auto& m = j.at("models").at(0);
  RectifyModel model;
  model.distortion.lambda = m.at("lambda_norm").get<double>();
  model.line = {m.at("line_norm").at(0).get<double>(),
                m.at("line_norm").at(1).get<double>()};
  return model;
}

}  // namespace radrect
