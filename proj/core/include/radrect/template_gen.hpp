#pragma once

#include <cstdint>
#include <vector>

#include "radrect/solver_template.hpp"
#include "radrect/zp.hpp"

namespace radrect {

// Instance-independent description of one configuration's polynomial system,
// derived once per configuration from exact GF(p) analysis of random
// scene-consistent instances: the solution count, the default (grevlex
// standard-monomial) quotient basis and the smallest expansion degree whose
// template is feasible for it.
struct SystemShape {
  Configuration config = Configuration::c222;
  int nvars = 3;
  int eq_degree = 4;
  int num_solutions = 0;
  int degree = 0;
  std::vector<Monomial> default_basis;

  struct ZpInstance {
    std::vector<Poly<Zp>> equations;
  };
  std::vector<ZpInstance> instances;  // exact instances for feasibility checks
};

SystemShape analyze_shape(Configuration config);

// Builds the elimination template for one quotient basis. basis_seed 0 keeps
// the default grevlex basis; other seeds deterministically mutate it. Throws
// infeasible_basis when the sampled basis does not admit a solvable template.
SolverTemplate generate_template(const SystemShape& shape, uint64_t basis_seed);

struct SelectionReport {
  struct Entry {
    uint64_t seed = 0;
    bool feasible = false;
    double median_residual = 0.0;
  };
  std::vector<Entry> entries;
  uint64_t selected_seed = 0;
  double selected_median = 0.0;
  double default_median = 0.0;
};

// Generates candidates for seeds 0..n_candidates-1 (0 = default basis),
// scores each on a shared set of synthetic noiseless instances by its median
// equation residual, and returns the best. Throws infeasible_basis only when
// every candidate fails. `seed` shifts the sampled candidate seeds and the
// evaluation set.
SolverTemplate sample_and_select(const SystemShape& shape, int n_candidates,
                                 int n_tests, SelectionReport* report = nullptr,
                                 uint64_t seed = 0);

// Lazily generated default-basis template, shared per configuration. This is
// the slower reference path used when no template files are supplied.
const SolverTemplate& default_template(Configuration config);

namespace detail {
// exact feasibility check used by the generator; returns the generic rank of
// the E block or -1 when infeasible
int feasibility_rank_zp(const SystemShape::ZpInstance& inst, int nvars,
                        int degree, int eq_degree,
                        const std::vector<Monomial>& basis);
}  // namespace detail

}  // namespace radrect
