// ============================================================================
// verify.hpp
//
// End-to-end verification machinery: manufactured-solution convergence
// studies over a nested mesh family and a battery of numerical invariant
// checks (structure of the discrete operators, divergence-freeness of the
// lifted velocity at solutions, energy balance, jump control of the coarse
// fluctuation).  Each check returns its measured value together with the
// threshold it was held to, so reports stay auditable.
// ============================================================================

#pragma once

#include "plfem/manufactured.hpp"
#include "plfem/solver.hpp"

#include <string>
#include <vector>

namespace plfem {

// Level ell solves on the red refinement of a (n0 * 2^ell) structured macro
// mesh, so h halves between consecutive levels.
FineMesh level_mesh(int n0, int level);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double err_u_w1r = 0.0;     // |u - u_h|_{1,r}
  double err_u_l2rt = 0.0;    // ||u - u_h||_{0,2r~}
  double err_p_lrt = 0.0;     // ||p - p_h||_{0,r~}
  double s_php = 0.0;         // s(p_h, p_h)
  double max_div_lift = 0.0;  // max_K |div L(u_h, p_h)|
  // log2 ratios against the previous row; NaN on the first row.
  double order_u_w1r = 0.0;
  double order_u_l2rt = 0.0;
  double order_p_lrt = 0.0;
};

struct ConvergenceTable {
  PowerLawParams params;
  std::string case_name;
  std::vector<ConvergenceRow> rows;
};

// Runs the study; keep_states optionally receives the solved state and mesh
// of every level for further inspection.
struct LevelState {
  FineMesh mesh;
  RT0Basis rt;
  SolutionState state;
};

ConvergenceTable run_convergence_study(const ManufacturedCase& mc,
                                       const PowerLawParams& params, int n0,
                                       int levels, const SolverConfig& config,
                                       std::vector<LevelState>* keep_states =
                                           nullptr);

void write_convergence_csv(const std::string& path,
                           const ConvergenceTable& table);

// One named check: measured value held against a threshold.
struct CheckResult {
  std::string id;
  std::string description;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// ---- individual checks, reused by the invariant suite and the acceptance
//      gate -----------------------------------------------------------------

// Derived exponents against independently evaluated branch formulas on a
// dense r sweep for d = 2 and d = 3, including the peak of r~.
CheckResult check_exponent_sweep(int points_per_dimension = 1000);

// RT0 normal traces: phi_F . n_F' = delta_FF' at facet quadrature points.
CheckResult check_rt_dof_pattern(const FineMesh& mesh);

// At a solved state: element divergence of the lifted velocity and
// orthogonality of div u_h against macro-constant pressures, both relative
// to |u_h|_{1,r}.
CheckResult check_lifted_divergence(const LevelState& ls,
                                    const PowerLawParams& params,
                                    double rel_tol);
CheckResult check_coarse_divergence(const LevelState& ls,
                                    const PowerLawParams& params,
                                    double rel_tol);

// Skew pairing of the lifted convection at a solved state:
// (L x u_h, grad u_h) ~ 0.
CheckResult check_skew_pairing(const LevelState& ls,
                               const PowerLawParams& params, double rel_tol);

// Divergence preservation of the Fortin interpolant on smooth fields with
// analytic divergence.
CheckResult check_fortin_identity(const FineMesh& mesh, int n_fields,
                                  unsigned seed, double rel_tol);

// Energy identity |u|^r + s(p,p) = <f, u> at a solved state.
CheckResult check_energy_identity(const LevelState& ls,
                                  const PowerLawParams& params,
                                  const VectorFn& f, double factor);

// Ratio ||q - Pi_H q||_{0,2} / (h^{(1-alpha)/2} s(q,q)^{1/2}) sampled over
// random P0 fields; returns the per-level maximum.
double jump_control_constant(const FineMesh& mesh,
                             const PowerLawParams& params, int n_fields,
                             unsigned seed);

// ---- composite runs -------------------------------------------------------

// Numerical invariant battery across meshes and exponents; every check the
// modules promise, evaluated at runtime.
std::vector<CheckResult> run_invariant_suite(int n0 = 2, int levels = 2);

}  // namespace plfem
