#include "radrect/polysolve.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "radrect/errors.hpp"

namespace radrect {

namespace {

int mono_key(const Monomial& m) {
  return int(m.e[0]) | (int(m.e[1]) << 8) | (int(m.e[2]) << 16);
}

void eval_with_jacobian(const ConstraintSystem& sys, const Eigen::Vector3d& z,
                        Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
  const int ne = int(sys.equations.size());
  const int nv = sys.nvars;
  f.setZero(ne);
  jac.setZero(ne, nv);
  const double zv[3] = {z.x(), z.y(), z.z()};
  for (int i = 0; i < ne; ++i) {
    for (const auto& [m, c] : sys.equations[size_t(i)].terms) {
      double t = c;
      for (int v = 0; v < nv; ++v)
        for (int k = 0; k < m.e[size_t(v)]; ++k) t *= zv[v];
      f(i) += t;
      for (int v = 0; v < nv; ++v) {
        if (m.e[size_t(v)] == 0) continue;
        double g = c * m.e[size_t(v)];
        for (int u = 0; u < nv; ++u) {
          const int e = m.e[size_t(u)] - (u == v ? 1 : 0);
          for (int k = 0; k < e; ++k) g *= zv[u];
        }
        jac(i, v) += g;
      }
    }
  }
}

// <= newton_steps damped Gauss-Newton iterations; keeps the argument when no
// improvement is possible
Eigen::Vector3d polish_solution(const ConstraintSystem& sys,
                                Eigen::Vector3d z, int steps) {
  const int nv = sys.nvars;
  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  eval_with_jacobian(sys, z, f, jac);
  double fnorm = f.norm();
  for (int it = 0; it < steps; ++it) {
    Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-f);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 5; ++h) {
      Eigen::Vector3d zt = z;
      zt.head(nv) += step * delta;
      Eigen::VectorXd ft;
      Eigen::MatrixXd jt;
      eval_with_jacobian(sys, zt, ft, jt);
      if (ft.norm() < fnorm) {
        z = zt;
        f = ft;
        jac = jt;
        fnorm = ft.norm();
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return z;
}

}  // namespace

SolutionSet solve(const SolverTemplate& tmpl, const ConstraintSystem& sys,
                  const SolveOptions& opts) {
  if (sys.nvars != tmpl.nvars || sys.config != tmpl.config)
    throw Error(ErrorCode::bad_arguments, "system does not match template");
  if (int(sys.equations.size()) != int(constraint_pairs(sys.config).size()))
    throw Error(ErrorCode::bad_arguments, "unexpected equation count");

  const int m = tmpl.rows(), n = tmpl.cols();
  std::unordered_map<int, int> col_of;
  col_of.reserve(size_t(n) * 2);
  for (int i = 0; i < n; ++i) col_of[mono_key(tmpl.monomials[size_t(i)])] = i;

  Eigen::MatrixXd c_mat = Eigen::MatrixXd::Zero(m, n);
  for (int r = 0; r < m; ++r) {
    const auto& [eq, mult] = tmpl.schedule[size_t(r)];
    for (const auto& [mon, coef] : sys.equations[size_t(eq)].terms) {
      const auto it = col_of.find(mono_key(mon.times(mult)));
      if (it == col_of.end())
        throw Error(ErrorCode::bad_arguments, "system support exceeds template");
      c_mat(r, it->second) = coef;
    }
    const double nrm = c_mat.row(r).norm();
    if (nrm > 0.0) c_mat.row(r) /= nrm;
  }

  // eliminate the E block; rank_e comes from the exact offline analysis
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_e(c_mat.leftCols(tmpl.n_e));
  {
    const auto& r_fac = qr_e.matrixR();
    const double r00 = std::abs(r_fac(0, 0));
    if (!(r00 > 0.0) ||
        std::abs(r_fac(tmpl.rank_e - 1, tmpl.rank_e - 1)) < opts.rank_tol * r00)
      throw Error(ErrorCode::rank_deficient_template,
                  "degenerate data: E block lost rank");
  }
  Eigen::MatrixXd qt_rb =
      qr_e.householderQ().transpose() * c_mat.rightCols(tmpl.n_r + tmpl.n_b);
  const int tail = m - tmpl.rank_e;
  Eigen::MatrixXd v_r = qt_rb.block(tmpl.rank_e, 0, tail, tmpl.n_r);
  Eigen::MatrixXd v_b = qt_rb.block(tmpl.rank_e, tmpl.n_r, tail, tmpl.n_b);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_v(v_r);
  {
    const auto& r_fac = qr_v.matrixR();
    const double r00 = std::abs(r_fac(0, 0));
    if (!(r00 > 0.0) ||
        std::abs(r_fac(tmpl.n_r - 1, tmpl.n_r - 1)) < opts.rank_tol * r00)
      throw Error(ErrorCode::rank_deficient_template,
                  "degenerate data: required block lost rank");
  }
  Eigen::MatrixXd x = qr_v.solve(-v_b);  // n_r x n_b

  Eigen::MatrixXd action = Eigen::MatrixXd::Zero(tmpl.n_b, tmpl.n_b);
  for (int i = 0; i < tmpl.n_b; ++i) {
    const int ar = tmpl.action_rows[size_t(i)];
    if (ar < tmpl.n_b)
      action(i, ar) = 1.0;
    else
      action.row(i) = x.row(ar - tmpl.n_b);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(action);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::rank_deficient_template,
                "eigendecomposition failed");

  SolutionSet out;
  const auto& ew = es.eigenvalues();
  const auto& ev = es.eigenvectors();
  for (int k = 0; k < tmpl.n_b; ++k) {
    if (std::abs(ew(k).imag()) > opts.tol_imag * (1.0 + std::abs(ew(k).real()))) {
      ++out.num_complex_discarded;
      continue;
    }
    const std::complex<double> w1 = ev(tmpl.b_one, k);
    if (std::abs(w1) < 1e-12 * ev.col(k).norm()) continue;  // solution at infinity
    const std::complex<double> r1 = ev(tmpl.b_v1, k) / w1;
    std::complex<double> r2{0.0, 0.0};
    if (tmpl.nvars == 3) r2 = ev(tmpl.b_v2, k) / w1;
    if (std::abs(r1.imag()) > opts.tol_imag * (1.0 + std::abs(r1.real())) ||
        std::abs(r2.imag()) > opts.tol_imag * (1.0 + std::abs(r2.real()))) {
      ++out.num_complex_discarded;
      continue;
    }
    Eigen::Vector3d z;
    if (tmpl.nvars == 3)
      z = {ew(k).real(), r1.real(), r2.real()};
    else
      z = {ew(k).real(), r1.real(), 0.0};
    if (opts.polish) z = polish_solution(sys, z, opts.newton_steps);

    Solution s;
    s.z = z;
    s.residual = system_residual(sys, z);
    if (s.residual > opts.tol_res) continue;
    out.solutions.push_back(s);
  }

  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const Solution& a, const Solution& b) {
              return a.residual < b.residual;
            });
  // deduplicate (polish can merge nearby eigenpairs)
  std::vector<Solution> unique;
  for (const auto& s : out.solutions) {
    bool dup = false;
    for (const auto& u : unique) {
      bool close = true;
      for (int v = 0; v < tmpl.nvars; ++v)
        if (std::abs(s.z(v) - u.z(v)) > 1e-7 * (1.0 + std::abs(u.z(v))))
          close = false;
      if (close) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(s);
  }
  out.solutions = std::move(unique);
  return out;
}

}  // namespace radrect
