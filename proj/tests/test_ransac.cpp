#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "radrect/errors.hpp"
#include "radrect/ransac.hpp"
#include "radrect/synthetic.hpp"
#include "test_support.hpp"

using namespace radrect;

namespace {

FrameSet set_with_clusters(const std::vector<int>& sizes) {
  FrameSet fs;
  Rng rng(1);
  int cluster = 0;
  for (int n : sizes) {
    for (int k = 0; k < n; ++k) {
      AffineFrame f;
      f.pts.col(0) = Eigen::Vector2d(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
      f.pts.col(1) = f.pts.col(0) + Eigen::Vector2d(0.00, 0.05);
      f.pts.col(2) = f.pts.col(0) + Eigen::Vector2d(0.05, 0.00);
      fs.frames.push_back(f);
      fs.cluster_ids.push_back(cluster);
    }
    ++cluster;
  }
  return fs;
}

}  // namespace

TEST_CASE("draw_sample takes the only feasible cluster") {
  Rng rng(2);
  const FrameSet fs = set_with_clusters({4});
  MinimalSample s = draw_sample(fs, Configuration::c4, rng);
  CHECK(s.groups.size() == 1);
  CHECK(s.groups[0].size() == 4);

  const FrameSet fs2 = set_with_clusters({10, 2});
  for (int t = 0; t < 20; ++t) {
    MinimalSample s2 = draw_sample(fs2, Configuration::c4, rng);
    // the quadruple can only come from the size-10 cluster
    for (const auto& f : s2.groups[0]) {
      bool from_big = false;
      for (int i = 0; i < 10; ++i)
        if (f.pts.isApprox(fs2.frames[size_t(i)].pts)) from_big = true;
      CHECK(from_big);
    }
  }
}

TEST_CASE("draw_sample selects clusters proportionally to size") {
  const FrameSet fs = set_with_clusters({6, 3, 3});
  const int n = 10000;
  int counts[3] = {0, 0, 0};
  Rng rng(3);
  for (int t = 0; t < n; ++t) {
    MinimalSample s = draw_sample(fs, Configuration::c32, rng);
    // locate the cluster supplying the triple
    for (int c = 0, base = 0; c < 3; ++c) {
      const int size = c == 0 ? 6 : 3;
      for (int i = 0; i < size; ++i)
        if (s.groups[0][0].pts.isApprox(fs.frames[size_t(base + i)].pts))
          counts[c]++;
      base += size;
    }
  }
  // triples: all clusters are eligible, expected share 0.5 / 0.25 / 0.25
  const double p0 = 0.5;
  const double sd = std::sqrt(n * p0 * (1 - p0));
  CHECK(std::abs(counts[0] - n * p0) < 3 * sd);
  const double p1 = 0.25;
  const double sd1 = std::sqrt(n * p1 * (1 - p1));
  CHECK(std::abs(counts[1] - n * p1) < 3 * sd1);
  CHECK(std::abs(counts[2] - n * p1) < 3 * sd1);
}

TEST_CASE("draw_sample reports insufficient data") {
  const FrameSet fs = set_with_clusters({3, 2});
  Rng rng(4);
  CHECK_THROWS_AS((void)draw_sample(fs, Configuration::c4, rng), Error);
}

TEST_CASE("consensus scores the truth perfectly on noiseless scenes") {
  Rng rng(5);
  SyntheticScene scene = gen_scene(rng, {});
  const ConsensusResult c = consensus(scene.frames, scene.gt.model, 0.1);
  CHECK(c.score == doctest::Approx(double(scene.frames.n_clusters())));
  CHECK(c.inliers.size() == scene.frames.frames.size());
  CHECK(c.degenerate_frames == 0);
}

TEST_CASE("consensus of a wildly wrong model scores strictly less") {
  Rng rng(6);
  int worse = 0, total = 0;
  for (int t = 0; t < 100; ++t) {
    SceneParams p;
    p.lambda = -4.0;
    SyntheticScene scene = gen_scene(rng, p);
    const double truth_score = consensus(scene.frames, scene.gt.model, 0.1).score;
    RectifyModel wrong = scene.gt.model;
    wrong.distortion.lambda = 0.5;
    const double wrong_score = consensus(scene.frames, wrong, 0.1).score;
    ++total;
    if (wrong_score < truth_score) ++worse;
  }
  CHECK(worse == total);
}

TEST_CASE("consensus of an empty frame set is zero") {
  FrameSet empty;
  const ConsensusResult c = consensus(empty, RectifyModel{}, 0.1);
  CHECK(c.score == 0.0);
  CHECK(c.inliers.empty());
}

TEST_CASE("local_optimize converges from a perturbed start") {
  Rng rng(7);
  SceneParams p;
  p.lambda = -4.0;
  SyntheticScene scene = gen_scene(rng, p);
  std::vector<int> all;
  for (int i = 0; i < int(scene.frames.frames.size()); ++i) all.push_back(i);

  RectifyModel start = scene.gt.model;
  start.distortion.lambda += 0.1;
  RefinementReport rep;
  const RectifyModel refined = local_optimize(start, scene.frames, all, &rep);
  CHECK(rep.accepted);
  CHECK(refined.distortion.lambda == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("local_optimize is stationary at the truth") {
  Rng rng(8);
  SyntheticScene scene = gen_scene(rng, {});
  std::vector<int> all;
  for (int i = 0; i < int(scene.frames.frames.size()); ++i) all.push_back(i);
  const RectifyModel refined =
      local_optimize(scene.gt.model, scene.frames, all, nullptr);
  CHECK(std::abs(refined.distortion.lambda -
                 scene.gt.model.distortion.lambda) < 1e-10);
  CHECK(std::abs(refined.line.l1 - scene.gt.model.line.l1) < 1e-10);
  CHECK(std::abs(refined.line.l2 - scene.gt.model.line.l2) < 1e-10);
}

TEST_CASE("local_optimize objective gradient matches central differences") {
  Rng rng(9);
  SyntheticScene scene = gen_scene(rng, {});
  std::vector<int> all;
  for (int i = 0; i < int(scene.frames.frames.size()); ++i) all.push_back(i);
  Rng prng(10);
  int tested = 0;
  while (tested < 20) {
    RectifyModel m = scene.gt.model;
    m.distortion.lambda += prng.uniform(-0.3, 0.3);
    m.line.l1 += prng.uniform(-0.05, 0.05);
    m.line.l2 += prng.uniform(-0.05, 0.05);
    const double f0 = local_opt_objective(m, scene.frames, all);
    if (!std::isfinite(f0) || f0 < 1e-16) continue;
    ++tested;
    const Eigen::Vector3d analytic = local_opt_gradient(m, scene.frames, all);
    REQUIRE(analytic.allFinite());
    const double deltas[3] = {1e-6, 1e-7, 1e-7};
    for (int v = 0; v < 3; ++v) {
      RectifyModel plus = m, minus = m;
      double* pp = v == 0 ? &plus.distortion.lambda
                          : (v == 1 ? &plus.line.l1 : &plus.line.l2);
      double* pm = v == 0 ? &minus.distortion.lambda
                          : (v == 1 ? &minus.line.l1 : &minus.line.l2);
      *pp += deltas[v];
      *pm -= deltas[v];
      const double central =
          (local_opt_objective(plus, scene.frames, all) -
           local_opt_objective(minus, scene.frames, all)) /
          (2 * deltas[v]);
      const double scale = std::max({std::abs(central), std::abs(analytic(v)), 1e-6});
      CHECK(std::abs(central - analytic(v)) / scale < 1e-5);
    }
  }
}

TEST_CASE("estimate solves noiseless scenes to numerical precision") {
  Rng rng(11);
  SceneParams p;
  p.lambda = -4.0;
  SyntheticScene scene = gen_scene(rng, p);
  RansacConfig rc;
  rc.config = Configuration::c222;
  rc.iterations = 25;
  rc.seed = 99;
  rc.score_mode = ScoreMode::warp_gt;
  const Estimate est = estimate(scene.frames, rc,
                                test::shared_sampled_template(rc.config));
  CHECK(est.score < 1e-6);  // pixels
  CHECK(est.iteration_found >= 0);
}

TEST_CASE("estimate is deterministic for a fixed seed") {
  Rng rng(12);
  SceneParams p;
  p.lambda = -4.0;
  SyntheticScene scene = gen_scene(rng, p);
  Rng noise(13);
  FrameSet noisy = add_noise(scene.frames, 1.0, noise);
  RansacConfig rc;
  rc.config = Configuration::c222;
  rc.iterations = 1;
  rc.seed = 5;
  const auto& tmpl = test::shared_sampled_template(rc.config);
  const Estimate a = estimate(noisy, rc, tmpl);
  const Estimate b = estimate(noisy, rc, tmpl);
  CHECK(a.model.distortion.lambda == b.model.distortion.lambda);
  CHECK(a.model.line.l1 == b.model.line.l1);
  CHECK(a.score == b.score);
  CHECK(a.iteration_found == b.iteration_found);
}

TEST_CASE("injected ground truth always wins benchmark scoring") {
  Rng rng(14);
  SceneParams p;
  p.lambda = -4.0;
  SyntheticScene scene = gen_scene(rng, p);
  Rng noise(15);
  FrameSet noisy = add_noise(scene.frames, 2.0, noise);
  RansacConfig rc;
  rc.config = Configuration::c32;
  rc.iterations = 10;
  rc.seed = 1;
  rc.score_mode = ScoreMode::warp_gt;
  const Estimate est =
      estimate(noisy, rc, test::shared_sampled_template(rc.config));
  const double truth_warp = warp_error(scene.gt.model, *noisy.gt).rms_px;
  CHECK(truth_warp <= est.score + 1e-12);
}

TEST_CASE("scale-ratio consensus is invariant to global scale") {
  // the score depends only on scale ratios: scaling all frame coordinates
  // (and the model consistently) leaves the inlier structure unchanged
  Rng rng(16);
  SceneParams p;
  p.lambda = -2.0;
  SyntheticScene scene = gen_scene(rng, p);
  Rng noise(17);
  FrameSet noisy = add_noise(scene.frames, 1.0, noise);
  const ConsensusResult base = consensus(noisy, scene.gt.model, 0.1);

  const double k = 2.0;
  FrameSet scaled = noisy;
  for (auto& f : scaled.frames) f.pts *= k;
  RectifyModel m2 = scene.gt.model;
  m2.distortion.lambda /= k * k;
  m2.line.l1 /= k;
  m2.line.l2 /= k;
  const ConsensusResult big = consensus(scaled, m2, 0.1);
  CHECK(base.score == doctest::Approx(big.score).epsilon(1e-12));
  CHECK(base.inliers == big.inliers);
}
