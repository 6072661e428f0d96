// Exact GF(p) analysis behind template generation: scene-consistent random
// instances, Macaulay expansions, standard-monomial extraction and template
// feasibility ranks.

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "radrect/constraints.hpp"
#include "radrect/constraints_detail.hpp"
#include "radrect/errors.hpp"
#include "radrect/rng.hpp"
#include "radrect/template_gen.hpp"
#include "radrect/zp.hpp"

namespace radrect {

std::vector<int> rref(ZpMatrix& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int pr = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c).v != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = c; j < m.cols; ++j) std::swap(m.at(r, j), m.at(pr, j));
    const Zp inv = m.at(r, c).inv();
    for (int j = c; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c).v == 0) continue;
      const Zp f = m.at(i, c);
      for (int j = c; j < m.cols; ++j)
        m.at(i, j) = m.at(i, j) - f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

namespace {

int mono_key(const Monomial& m) {
  return int(m.e[0]) | (int(m.e[1]) << 8) | (int(m.e[2]) << 16);
}

using MonoIndex = std::unordered_map<int, int>;

MonoIndex index_of(const std::vector<Monomial>& mons) {
  MonoIndex idx;
  idx.reserve(mons.size() * 2);
  for (int i = 0; i < int(mons.size()); ++i) idx[mono_key(mons[i])] = i;
  return idx;
}

// Distorted frames over GF(p) whose rectified scales are exactly equal:
// rectified triples share one determinant (SL2 + translation copies of a base
// triple) and are pulled back through the rectification, solving the
// per-point quadratic lam*(u^2+v^2)*t^2 + (l1*u + l2*v - 1)*t + 1 = 0 for the
// homogeneous factor t.
std::optional<std::vector<detail::FrameT<Zp>>> zp_scene_frames(
    int n_frames, Rng& rng, Zp lam, Zp l1, Zp l2) {
  std::array<std::array<Zp, 2>, 3> base;
  for (auto& pt : base)
    pt = {Zp(int64_t(1 + rng.uniform_int(999))),
          Zp(int64_t(1 + rng.uniform_int(999)))};
  std::vector<detail::FrameT<Zp>> frames;
  for (int k = 0; k < n_frames; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const Zp a(int64_t(1 + rng.uniform_int(97)));
      const Zp b(int64_t(rng.uniform_int(97)));
      const Zp c(int64_t(rng.uniform_int(97)));
      const Zp d = (Zp(1) + b * c) * a.inv();
      const Zp tx(int64_t(rng.uniform_int(997))), ty(int64_t(rng.uniform_int(997)));
      detail::FrameT<Zp> f;
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        const Zp u = a * base[size_t(i)][0] + b * base[size_t(i)][1] + tx;
        const Zp v = c * base[size_t(i)][0] + d * base[size_t(i)][1] + ty;
        const Zp qa = lam * (u * u + v * v);
        const Zp qb = l1 * u + l2 * v - Zp(1);
        Zp t;
        if (qa.v == 0) {
          if (qb.v == 0) {
            ok = false;
            break;
          }
          t = (Zp(0) - Zp(1)) * qb.inv();
        } else {
          Zp s;
          if (!(qb * qb - Zp(4) * qa).sqrt(s)) {
            ok = false;
            break;
          }
          t = (s - qb) * (Zp(2) * qa).inv();
        }
        if (t.v == 0) {
          ok = false;
          break;
        }
        f.pts[size_t(i)] = {u * t, v * t};
      }
      if (ok) {
        frames.push_back(f);
        placed = true;
      }
    }
    if (!placed) return std::nullopt;
  }
  return frames;
}

SystemShape::ZpInstance make_zp_instance(Configuration config, Rng& rng,
                                         std::optional<Zp> lam_fixed) {
  const int need = frames_required(config);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Zp lam = lam_fixed ? *lam_fixed
                             : Zp(int64_t(1 + rng.uniform_int(Zp::p - 2)));
    const Zp l1(int64_t(1 + rng.uniform_int(Zp::p - 2)));
    const Zp l2(int64_t(1 + rng.uniform_int(Zp::p - 2)));
    auto frames = zp_scene_frames(need, rng, lam, l1, l2);
    if (!frames) continue;
    SystemShape::ZpInstance inst;
    std::optional<Zp> lf = lam_fixed ? std::optional<Zp>(lam) : std::nullopt;
    inst.equations = detail::build_equations(config, *frames, Zp(1), lf,
                                             constraint_pairs(config));
    // sanity: equations vanish at the ground truth
    const Zp z[3] = {lam_fixed ? l1 : lam, lam_fixed ? l2 : l1,
                     lam_fixed ? Zp(0) : l2};
    bool ok = true;
    for (const auto& f : inst.equations)
      if (f.eval(z).v != 0) ok = false;
    if (ok) return inst;
  }
  throw Error(ErrorCode::retry_exhausted, "GF(p) instance generation failed");
}

ZpMatrix macaulay_zp(const std::vector<Poly<Zp>>& eqs, int nvars, int degree,
                     const std::vector<Monomial>& cols) {
  const MonoIndex idx = index_of(cols);
  std::vector<std::pair<int, Monomial>> sched;
  for (int e = 0; e < int(eqs.size()); ++e) {
    const int fd = eqs[size_t(e)].degree();
    for (const auto& m : monomials_up_to(nvars, degree - fd))
      sched.emplace_back(e, m);
  }
  ZpMatrix mat(int(sched.size()), int(cols.size()));
  for (int r = 0; r < mat.rows; ++r) {
    const auto& [e, mult] = sched[size_t(r)];
    for (const auto& [m, c] : eqs[size_t(e)].terms) {
      // columns outside `cols` (the basis block during feasibility checks)
      // are projected out
      const auto it = idx.find(mono_key(m.times(mult)));
      if (it != idx.end()) mat.at(r, it->second) = c;
    }
  }
  return mat;
}

// standard monomials (non-pivot columns) of the grevlex-ordered Macaulay
// expansion at `degree`
std::vector<Monomial> standard_monomials(const SystemShape::ZpInstance& inst,
                                         int nvars, int degree) {
  auto cols = monomials_up_to(nvars, degree);
  ZpMatrix mat = macaulay_zp(inst.equations, nvars, degree, cols);
  auto piv = rref(mat);
  std::unordered_set<int> pivset(piv.begin(), piv.end());
  std::vector<Monomial> std_mons;
  for (int i = 0; i < int(cols.size()); ++i)
    if (!pivset.count(i)) std_mons.push_back(cols[size_t(i)]);
  return std_mons;
}

}  // namespace

namespace detail {

int feasibility_rank_zp(const SystemShape::ZpInstance& inst, int nvars,
                        int degree, int eq_degree,
                        const std::vector<Monomial>& basis) {
  (void)eq_degree;
  auto all = monomials_up_to(nvars, degree);
  std::unordered_set<int> bset;
  for (const auto& b : basis) bset.insert(mono_key(b));
  const Monomial action = (nvars == 3) ? mono(1, 0, 0) : mono(1, 0);
  std::unordered_set<int> rset;
  std::vector<Monomial> r_cols;
  std::unordered_set<int> allset;
  for (const auto& m : all) allset.insert(mono_key(m));
  for (const auto& b : basis) {
    const Monomial ab = b.times(action);
    if (!allset.count(mono_key(ab))) return -1;  // basis too high for degree
    if (!bset.count(mono_key(ab)) && rset.insert(mono_key(ab)).second)
      r_cols.push_back(ab);
  }
  std::sort(r_cols.begin(), r_cols.end(), [](const Monomial& a, const Monomial& b) {
    return Monomial::grevlex_less(b, a);
  });
  std::vector<Monomial> e_cols;
  for (const auto& m : all)
    if (!bset.count(mono_key(m)) && !rset.count(mono_key(m)))
      e_cols.push_back(m);

  // feasible iff rank([C_E C_R]) == rank(C_E) + |R|: every required monomial
  // can be expressed in the basis once E is eliminated
  std::vector<Monomial> er = e_cols;
  er.insert(er.end(), r_cols.begin(), r_cols.end());
  ZpMatrix mat = macaulay_zp(inst.equations, nvars, degree, er);
  auto piv = rref(mat);
  const int n_e = int(e_cols.size());
  int rank_e = 0, rank_r = 0;
  for (int c : piv) (c < n_e ? rank_e : rank_r)++;
  if (rank_r != int(r_cols.size())) return -1;
  return rank_e;
}

}  // namespace detail

SystemShape analyze_shape(Configuration config) {
  SystemShape shape;
  shape.config = config;
  const bool fixed = (config == Configuration::c22_fixed);
  shape.nvars = fixed ? 2 : 3;
  shape.eq_degree = fixed ? 3 : 4;

  Rng rng(0x5eedULL + uint64_t(config));
  // for the fixed-lambda solver, cover both generic and zero distortion
  const std::vector<std::optional<Zp>> lam_choices =
      fixed ? std::vector<std::optional<Zp>>{Zp(7), Zp(0), Zp(123457)}
            : std::vector<std::optional<Zp>>{std::nullopt, std::nullopt,
                                             std::nullopt};
  for (const auto& lc : lam_choices)
    shape.instances.push_back(make_zp_instance(config, rng, lc));

  // Default basis: standard monomials whose count has stabilized in degree.
  // The expansion keeps accruing straggler standard monomials of the top
  // degrees (the solvers' component at infinity), so the basis is read off as
  // the low-degree plateau.
  const int d_hi = fixed ? 8 : 11;
  auto std_mons = standard_monomials(shape.instances[0], shape.nvars, d_hi);
  std::vector<int> count_by_cap(size_t(d_hi) + 2, 0);
  for (const auto& m : std_mons)
    for (int cap = m.degree(); cap <= d_hi + 1; ++cap)
      count_by_cap[size_t(cap)]++;
  int cap = -1;
  for (int c = 1; c + 1 <= d_hi; ++c)
    if (count_by_cap[size_t(c)] > 0 &&
        count_by_cap[size_t(c)] == count_by_cap[size_t(c) + 1]) {
      cap = c;
      break;
    }
  if (cap < 0)
    throw Error(ErrorCode::infeasible_basis,
                "no stable standard-monomial basis found");
  for (const auto& m : std_mons)
    if (m.degree() <= cap) shape.default_basis.push_back(m);
  std::sort(shape.default_basis.begin(), shape.default_basis.end(),
            [](const Monomial& a, const Monomial& b) {
              return Monomial::grevlex_less(b, a);
            });
  shape.num_solutions = int(shape.default_basis.size());

  // cross-check the basis against a second instance
  {
    auto std2 = standard_monomials(shape.instances[1], shape.nvars, d_hi);
    std::unordered_set<int> s2;
    for (const auto& m : std2) s2.insert(mono_key(m));
    for (const auto& m : shape.default_basis)
      if (!s2.count(mono_key(m)))
        throw Error(ErrorCode::infeasible_basis,
                    "standard basis differs between instances");
  }

  // smallest expansion degree at which the default template is feasible,
  // with a consistent E-block rank across instances
  int maxdeg = 0;
  for (const auto& m : shape.default_basis)
    maxdeg = std::max(maxdeg, m.degree());
  for (int d = std::max(maxdeg + 1, shape.eq_degree + 1); d <= 13; ++d) {
    int rank = detail::feasibility_rank_zp(shape.instances[0], shape.nvars, d,
                                           shape.eq_degree, shape.default_basis);
    if (rank < 0) continue;
    bool consistent = true;
    for (size_t i = 1; i < shape.instances.size(); ++i)
      if (detail::feasibility_rank_zp(shape.instances[i], shape.nvars, d,
                                      shape.eq_degree,
                                      shape.default_basis) != rank)
        consistent = false;
    if (consistent) {
      shape.degree = d;
      return shape;
    }
  }
  throw Error(ErrorCode::infeasible_basis,
              "no feasible expansion degree up to 13");
}

}  // namespace radrect
