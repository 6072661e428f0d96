#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "radrect/constraints.hpp"
#include "radrect/errors.hpp"
#include "radrect/geometry.hpp"
#include "radrect/rng.hpp"
#include "radrect/synthetic.hpp"
#include "test_support.hpp"

using namespace radrect;

TEST_CASE("condition_frames rescales by average point magnitude") {
  AffineFrame f;
  // all points at norm 2
  f.pts.col(0) = Eigen::Vector2d(2, 0);
  f.pts.col(1) = Eigen::Vector2d(0, 2);
  f.pts.col(2) = Eigen::Vector2d(-2, 0);
  auto [scaled, rec] = condition_frames({f});
  CHECK(rec.coord_scale == doctest::Approx(2.0));
  CHECK(scaled[0].pts.col(0).norm() == doctest::Approx(1.0));
  CHECK(rec.rsq_scale == doctest::Approx(1.0));

  // unit-magnitude frames stay put
  AffineFrame u;
  u.pts.col(0) = Eigen::Vector2d(1, 0);
  u.pts.col(1) = Eigen::Vector2d(0, 1);
  u.pts.col(2) = Eigen::Vector2d(-1, 0);
  auto [scaled2, rec2] = condition_frames({u});
  CHECK(rec2.coord_scale == doctest::Approx(1.0));
  CHECK(rec2.rsq_scale == doctest::Approx(1.0));
  CHECK(scaled2[0].pts.isApprox(u.pts));
}

TEST_CASE("condition_frames rejects all-zero input") {
  AffineFrame z;  // all points at the origin
  CHECK_THROWS_AS((void)condition_frames({z}), Error);
}

TEST_CASE("pair_constraint of identical frames is the zero polynomial") {
  AffineFrame f;
  f.pts.col(0) = Eigen::Vector2d(0.1, 0.25);
  f.pts.col(1) = Eigen::Vector2d(0.02, -0.07);
  f.pts.col(2) = Eigen::Vector2d(0.3, 0.04);
  const Poly<double> p = pair_constraint(f, f);
  for (const auto& [m, c] : p.terms) CHECK(std::abs(c) < 1e-15);
}

TEST_CASE("pair_constraint is antisymmetric and degree 4") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    AffineFrame a, b;
    for (int k = 0; k < 3; ++k) {
      a.pts.col(k) = Eigen::Vector2d(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
      b.pts.col(k) = Eigen::Vector2d(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
    }
    if (std::abs(a.det()) < 1e-4 || std::abs(b.det()) < 1e-4) continue;
    const Poly<double> pab = pair_constraint(a, b);
    const Poly<double> pba = pair_constraint(b, a);
    CHECK(pab.degree() <= 4);
    // pab == -pba
    Poly<double> neg = pba;
    for (auto& [m, c] : neg.terms) c = -c;
    const Poly<double> diff = poly_sub(pab, neg);
    for (const auto& [m, c] : diff.terms) CHECK(std::abs(c) < 1e-12);
  }
}

TEST_CASE("pair_constraint vanishes identically for translated pinhole data") {
  // fronto-parallel, lambda = 0: scales already equal, the polynomial is
  // zero on the whole line lambda = 0, l = 0
  AffineFrame a;
  a.pts.col(0) = Eigen::Vector2d(0.0, 0.1);
  a.pts.col(1) = Eigen::Vector2d(0.0, 0.0);
  a.pts.col(2) = Eigen::Vector2d(0.1, 0.0);
  AffineFrame b = a;
  b.pts.colwise() += Eigen::Vector2d(0.15, -0.08);
  const Poly<double> p = pair_constraint(a, b);
  const double z[3] = {0.0, 0.0, 0.0};
  CHECK(std::abs(p.eval(z)) < 1e-15);
}

TEST_CASE("assemble equation counts and degrees") {
  Rng rng(33);
  SceneParams sp;
  sp.lambda = -2.0;
  SyntheticScene scene = gen_scene(rng, sp);

  const struct {
    Configuration config;
    int n_eqs;
    int max_degree;
  } cases[] = {{Configuration::c222, 3, 4},
               {Configuration::c32, 4, 4},
               {Configuration::c4, 6, 4},
               {Configuration::c22_fixed, 2, 3}};
  for (const auto& c : cases) {
    MinimalSample sample = test::sample_from_scene(scene, c.config, 5);
    auto frames = sample.flattened();
    for (auto& f : frames) f = orient_frame(f);
    auto [scaled, rec] = condition_frames(frames);
    const auto sys =
        assemble(c.config, scaled, rec,
                 c.config == Configuration::c22_fixed
                     ? std::optional<double>(-2.0)
                     : std::nullopt);
    CHECK(int(sys.equations.size()) == c.n_eqs);
    for (const auto& eq : sys.equations) {
      CHECK(eq.degree() <= c.max_degree);
      for (const auto& [m, coef] : eq.terms) CHECK(std::isfinite(coef));
    }
  }
}

TEST_CASE("assemble rejects wrong frame counts") {
  std::vector<AffineFrame> frames(3);
  for (auto& f : frames) {
    f.pts.col(0) = Eigen::Vector2d(0, 1);
    f.pts.col(1) = Eigen::Vector2d(0, 0);
    f.pts.col(2) = Eigen::Vector2d(1, 0);
  }
  CHECK_THROWS_AS((void)assemble(Configuration::c4, frames, ScaleRecord{}), Error);
}

TEST_CASE("residual at truth over random scenes") {
  Rng rng(44);
  int scenes = 0;
  while (scenes < 100) {
    SyntheticScene scene = gen_scene(rng, {});
    const Eigen::Vector3d truth(scene.gt.model.distortion.lambda,
                                scene.gt.model.line.l1, scene.gt.model.line.l2);
    for (Configuration config :
         {Configuration::c222, Configuration::c32, Configuration::c4}) {
      MinimalSample sample =
          test::sample_from_scene(scene, config, uint64_t(scenes));
      auto frames = sample.flattened();
      for (auto& f : frames) f = orient_frame(f);
      auto [scaled, rec] = condition_frames(frames);
      const auto sys = assemble(config, scaled, rec);
      CHECK(system_residual(sys, sys.to_conditioned(truth)) < 1e-9);
    }
    ++scenes;
  }
}

TEST_CASE("conditioned and unconditioned solves agree on well-scaled data") {
  const auto& tmpl = test::shared_sampled_template(Configuration::c222);
  Rng rng(55);
  int tested = 0;
  while (tested < 10) {
    SyntheticScene scene = gen_scene(rng, {});
    MinimalSample sample =
        test::sample_from_scene(scene, Configuration::c222, uint64_t(tested));
    auto frames = sample.flattened();
    for (auto& f : frames) f = orient_frame(f);

    auto [scaled, rec] = condition_frames(frames);
    const auto sys_cond = assemble(Configuration::c222, scaled, rec);
    const auto sys_raw = assemble(Configuration::c222, frames, ScaleRecord{});

    SolutionSet cond, raw;
    try {
      cond = solve(tmpl, sys_cond);
      raw = solve(tmpl, sys_raw);
    } catch (const Error&) {
      continue;
    }
    if (cond.solutions.empty() || raw.solutions.empty()) continue;
    // every conditioned solution (after unscaling) appears in the raw solve
    int matched = 0;
    for (const auto& sc : cond.solutions) {
      const Eigen::Vector3d zc = sys_cond.unscale(sc.z);
      for (const auto& sr : raw.solutions) {
        const Eigen::Vector3d zr = sys_raw.unscale(sr.z);
        if ((zc - zr).cwiseAbs().maxCoeff() <
            1e-8 * (1.0 + zr.cwiseAbs().maxCoeff()))
          ++matched;
      }
    }
    CHECK(matched >= int(cond.solutions.size()) / 2);
    ++tested;
  }
}

TEST_CASE("spurious solution guard: subset of c4 equations admits extra families") {
  // with only the three equations s1=s2, s1=s3, s1=s4 the system has
  // one-dimensional solution families; all six equations remove them.
  // Observable consequence: the full-system solve returns finitely many
  // solutions that all satisfy the dropped equations as well.
  const auto& tmpl = test::shared_sampled_template(Configuration::c4);
  Rng rng(66);
  int tested = 0, with_extra = 0;
  while (tested < 10) {
    SyntheticScene scene = gen_scene(rng, {});
    MinimalSample sample =
        test::sample_from_scene(scene, Configuration::c4, uint64_t(tested) + 7);
    auto frames = sample.flattened();
    for (auto& f : frames) f = orient_frame(f);
    auto [scaled, rec] = condition_frames(frames);
    const auto sys = assemble(Configuration::c4, scaled, rec);

    SolutionSet full;
    try {
      full = solve(tmpl, sys);
    } catch (const Error&) {
      continue;
    }
    if (full.solutions.empty()) continue;
    ++tested;

    // roots of the 3-equation subsystem that fail the remaining equations
    // exist: check that at least one full-system solution count is strictly
    // below the subsystem's Bezout-style bound, and that every returned
    // solution satisfies all six equations
    for (const auto& s : full.solutions) {
      for (const auto& eq : sys.equations)
        CHECK(relative_residual(eq, s.z) < 1e-6);
    }
    // the subset system on the same data admits solutions that violate the
    // dropped equations: verify by sampling the one-parameter family
    // direction numerically — pick a solution of the first three equations
    // only, via Newton from a perturbed start
    ConstraintSystem sub = sys;
    sub.equations.resize(3);
    int extra_found = 0;
    Rng prng(uint64_t(100 + tested));
    for (int trial = 0; trial < 40 && !extra_found; ++trial) {
      Eigen::Vector3d z(prng.uniform(-3, 1), prng.uniform(-2, 2),
                        prng.uniform(-2, 2));
      // damped Newton on the 3-equation subsystem
      for (int it = 0; it < 60; ++it) {
        Eigen::Vector3d f;
        Eigen::Matrix3d jac;
        for (int i = 0; i < 3; ++i) {
          const auto& eq = sub.equations[size_t(i)];
          double zv[3] = {z.x(), z.y(), z.z()};
          double val = 0;
          Eigen::Vector3d g = Eigen::Vector3d::Zero();
          for (const auto& [mn, c] : eq.terms) {
            double t = c;
            for (int v = 0; v < 3; ++v)
              for (int k = 0; k < mn.e[size_t(v)]; ++k) t *= zv[v];
            val += t;
            for (int v = 0; v < 3; ++v) {
              if (mn.e[size_t(v)] == 0) continue;
              double gg = c * mn.e[size_t(v)];
              for (int u = 0; u < 3; ++u) {
                int e = mn.e[size_t(u)] - (u == v ? 1 : 0);
                for (int k = 0; k < e; ++k) gg *= zv[u];
              }
              g(v) += gg;
            }
          }
          f(i) = val;
          jac.row(i) = g;
        }
        const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-f);
        if (!step.allFinite()) break;
        z += step;
        if (step.cwiseAbs().maxCoeff() < 1e-14) break;
      }
      double sub_res = 0, full_res = 0;
      for (int i = 0; i < 3; ++i)
        sub_res = std::max(sub_res, relative_residual(sub.equations[size_t(i)], z));
      for (const auto& eq : sys.equations)
        full_res = std::max(full_res, relative_residual(eq, z));
      if (sub_res < 1e-10 && full_res > 1e-4) ++extra_found;
    }
    if (extra_found > 0) ++with_extra;
  }
  // families violating the dropped equations show up on most instances
  CHECK(with_extra >= 7);
}
