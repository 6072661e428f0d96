#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"
#include "radrect/minimal_solvers.hpp"
#include "radrect/synthetic.hpp"
#include "test_support.hpp"

using namespace radrect;

TEST_CASE("solve_minimal recovers ground truth on a noiseless c4 sample") {
  Rng rng(71);
  SceneParams sp;
  sp.lambda = -4.0;
  SyntheticScene scene = gen_scene(rng, sp);
  MinimalSample sample = test::sample_from_scene(scene, Configuration::c4, 1);
  auto candidates =
      solve_minimal(sample, test::shared_sampled_template(Configuration::c4));
  REQUIRE(!candidates.empty());
  double best = 1e9;
  for (const auto& c : candidates)
    if (c.feasible)
      best = std::min(best, std::abs(c.model.distortion.lambda + 4.0) / 4.0);
  CHECK(best < 1e-6);
}

TEST_CASE("fronto-parallel pinhole sample contains the zero model") {
  Rng rng(72);
  SceneParams sp;
  sp.lambda = 0.0;
  sp.force_fronto_parallel = true;
  SyntheticScene scene = gen_scene(rng, sp);
  CHECK(scene.gt.model.line.l1 == doctest::Approx(0.0));
  CHECK(scene.gt.model.line.l2 == doctest::Approx(0.0));
  MinimalSample sample = test::sample_from_scene(scene, Configuration::c222, 2);
  auto candidates = solve_minimal(
      sample, test::shared_sampled_template(Configuration::c222));
  bool found = false;
  for (const auto& c : candidates)
    if (std::abs(c.model.distortion.lambda) < 1e-6 &&
        std::abs(c.model.line.l1) < 1e-6 && std::abs(c.model.line.l2) < 1e-6)
      found = true;
  CHECK(found);
}

TEST_CASE("solve_minimal validates the sample shape") {
  MinimalSample sample;
  sample.config = Configuration::c4;
  sample.groups = {{AffineFrame{}, AffineFrame{}, AffineFrame{}}};
  CHECK_THROWS_AS(
      (void)solve_minimal(sample,
                          test::shared_sampled_template(Configuration::c4)),
      Error);
}

TEST_CASE("reflected input frames leave the estimate unchanged") {
  Rng rng(73);
  SceneParams sp;
  sp.lambda = -2.5;
  SyntheticScene scene = gen_scene(rng, sp);
  MinimalSample sample = test::sample_from_scene(scene, Configuration::c222, 3);
  const auto& tmpl = test::shared_sampled_template(Configuration::c222);
  auto base = solve_minimal(sample, tmpl);

  MinimalSample mirrored = sample;
  for (auto& group : mirrored.groups)
    for (auto& f : group) {
      AffineFrame r;
      r.pts.col(0) = f.pts.col(2);
      r.pts.col(1) = f.pts.col(1);
      r.pts.col(2) = f.pts.col(0);
      f = r;
    }
  auto flipped = solve_minimal(mirrored, tmpl);
  REQUIRE(base.size() == flipped.size());
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].model.distortion.lambda ==
          doctest::Approx(flipped[i].model.distortion.lambda).epsilon(1e-12));
    CHECK(base[i].model.line.l1 ==
          doctest::Approx(flipped[i].model.line.l1).epsilon(1e-12));
  }
}

TEST_CASE("chart consistency: unscaling inverts conditioning") {
  Rng rng(74);
  SyntheticScene scene = gen_scene(rng, {});
  MinimalSample sample = test::sample_from_scene(scene, Configuration::c222, 4);
  auto frames = sample.flattened();
  for (auto& f : frames) f = orient_frame(f);
  auto [scaled, rec] = condition_frames(frames);
  const auto sys = assemble(Configuration::c222, scaled, rec);
  Rng vals(75);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Vector3d z(vals.uniform(-8, 0.5), vals.uniform(-2, 2),
                            vals.uniform(-2, 2));
    const Eigen::Vector3d back = sys.unscale(sys.to_conditioned(z));
    CHECK(std::abs(back.x() - z.x()) <= 1e-15 * std::abs(z.x()));
    CHECK(std::abs(back.y() - z.y()) <= 1e-15 * std::abs(z.y()));
    CHECK(std::abs(back.z() - z.z()) <= 1e-15 * std::abs(z.z()));
  }
}

TEST_CASE("check_degeneracy flags constructed cases") {
  // all points on one circle of radius 0.3 around the center
  MinimalSample sample;
  sample.config = Configuration::c4;
  sample.groups.resize(1);
  Rng rng(76);
  for (int k = 0; k < 4; ++k) {
    AffineFrame f;
    for (int i = 0; i < 3; ++i) {
      const double th = rng.uniform(0, 6.283185307179586);
      f.pts.col(i) = 0.3 * Eigen::Vector2d(std::cos(th), std::sin(th));
    }
    sample.groups[0].push_back(f);
  }
  auto flags = check_degeneracy(sample);
  bool concentric = false;
  for (auto f : flags)
    if (f == DegeneracyFlag::concentric_points) concentric = true;
  CHECK(concentric);

  // collinear frame
  MinimalSample bad = sample;
  bad.groups[0][0].pts.col(0) = Eigen::Vector2d(0.0, 0.0);
  bad.groups[0][0].pts.col(1) = Eigen::Vector2d(0.1, 0.1);
  bad.groups[0][0].pts.col(2) = Eigen::Vector2d(0.2, 0.2);
  flags = check_degeneracy(bad);
  bool collinear = false;
  for (auto f : flags)
    if (f == DegeneracyFlag::collinear_frame) collinear = true;
  CHECK(collinear);
}

TEST_CASE("generic scenes are almost never flagged") {
  Rng rng(77);
  int flagged = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    SyntheticScene scene = gen_scene(rng, {});
    MinimalSample sample =
        test::sample_from_scene(scene, Configuration::c222, uint64_t(i));
    if (!check_degeneracy(sample).empty()) ++flagged;
  }
  CHECK(flagged <= n / 100);
}

TEST_CASE("collinear frame in the sample raises degenerate_sample") {
  Rng rng(78);
  SyntheticScene scene = gen_scene(rng, {});
  MinimalSample sample = test::sample_from_scene(scene, Configuration::c4, 5);
  sample.groups[0][1].pts.col(0) = Eigen::Vector2d(0.00, 0.00);
  sample.groups[0][1].pts.col(1) = Eigen::Vector2d(0.05, 0.05);
  sample.groups[0][1].pts.col(2) = Eigen::Vector2d(0.10, 0.10);
  try {
    (void)solve_minimal(sample, test::shared_sampled_template(Configuration::c4));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_sample);
  }
}
