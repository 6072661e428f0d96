#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "radrect/polynomial.hpp"
#include "radrect/types.hpp"

namespace radrect {

// Precomputed elimination-template structure for one configuration.
//
// Column layout of the expanded coefficient matrix is [E | R | B]:
//   B  quotient-basis monomials (|B| = number of solutions),
//   R  monomials action_var*B \ B that must be expressed in the basis,
//   E  everything else, eliminated first.
// The schedule lists which monomial multiple of which input equation fills
// each row. rank_e is the exact generic rank of the E block, established
// offline over GF(p); the runtime elimination trusts it and treats data that
// cannot reproduce it as degenerate.
struct SolverTemplate {
  int version = 1;
  Configuration config = Configuration::c222;
  int nvars = 3;
  int degree = 0;
  int num_solutions = 0;
  int rank_e = 0;
  uint64_t basis_seed = 0;  // 0 = default grevlex basis

  std::vector<Monomial> monomials;  // all columns, [E | R | B] order
  int n_e = 0, n_r = 0, n_b = 0;
  std::vector<std::pair<int, Monomial>> schedule;  // rows: (equation, multiplier)

  // readout positions inside the basis block: the constant monomial and the
  // non-action unknowns (l1, l2 — or just l2 when lambda is fixed)
  int b_one = -1, b_v1 = -1, b_v2 = -1;

  // for each basis monomial i: action*b_i as an index into B (if < n_b) or
  // n_b + index into R
  std::vector<int> action_rows;

  double selection_score = std::numeric_limits<double>::quiet_NaN();

  int rows() const { return int(schedule.size()); }
  int cols() const { return int(monomials.size()); }
};

void save_template(const SolverTemplate& t, const std::string& path);
SolverTemplate load_template(const std::string& path);

// conventional file name inside a template directory
std::string template_filename(Configuration c);

// All four solver templates. Loading tolerates missing files; access by
// config throws io_error when absent.
struct TemplateSet {
  std::map<Configuration, SolverTemplate> by_config;

  const SolverTemplate& get(Configuration c) const;
  bool has(Configuration c) const { return by_config.count(c) > 0; }
};

TemplateSet load_template_set(const std::string& dir);

}  // namespace radrect
