// ============================================================================
// solver.hpp
//
// Fixed-point (Picard) solution of the stabilised power-law system.  Each
// sweep freezes the viscosity at the current velocity gradient and the
// advecting field at the current lifted velocity, then solves the linear
// saddle-point system by sparse LU.  The first sweep is a plain Stokes solve
// (unit viscosity, no convection), which also seeds the lifted field with an
// exactly divergence-free state.
//
// Convergence is declared on the scaled max-norm of the nonlinear algebraic
// residual; non-convergence is never silent, the returned state carries the
// complete residual history and a message.
// ============================================================================

#pragma once

#include "plfem/assembly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plfem {

struct SolverConfig {
  double tolerance = 1e-10;        // scaled nonlinear residual
  int max_iterations = 200;
  double theta = 0.0;              // damping; 0 selects 1.0 (r >= 2) / 0.7 (r < 2)
  double linear_tolerance = 1e-10; // accepted relative residual of each LU solve
  int rhs_quad_degree = 7;

  double resolved_theta(const PowerLawParams& params) const {
    if (theta > 0.0) return theta;
    return params.r >= 2.0 ? 1.0 : 0.7;
  }
};

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;
  double nu_min = 0.0;
  double nu_max = 0.0;
  double s_php = 0.0;  // stabilisation energy s(p,p) of the iterate
};

struct SolutionState {
  P1VectorField u;
  P0Field p;
  double multiplier = 0.0;  // pressure-mean multiplier; ~0 at solutions
  bool converged = false;
  std::vector<IterationRecord> history;
  std::string message;
};

// Solution of one linearised saddle-point system.
struct SaddleSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  double lambda = 0.0;
  double rel_residual = 0.0;
};

// Direct sparse LU on the full block system; throws on breakdown or when the
// relative algebraic residual exceeds linear_tolerance.
SaddleSolution linear_saddle_solve(const StabilisedSystem& sys,
                                   double linear_tolerance);

SolutionState picard_solve(const FineMesh& mesh, const RT0Basis& rt,
                           const PowerLawParams& params, const VectorFn& f,
                           const SolverConfig& config);

// The a-priori bounded quantities of a solved state.
struct AprioriReport {
  double u_energy = 0.0;     // |u|^r_{1,r}
  double lift_norm = 0.0;    // ||L(u,p)||_{0,2r~}
  double stab_energy = 0.0;  // s(p,p)
  double p_norm = 0.0;       // ||p||_{0,r~}
};

AprioriReport apriori_quantities(const FineMesh& mesh, const RT0Basis& rt,
                                 const PowerLawParams& params,
                                 const SolutionState& state);

// Iteration log as CSV (columns iter,residual,nu_min,nu_max,s_php) with the
// exponent header.
void write_iteration_log(const std::string& path, const PowerLawParams& params,
                         const std::vector<IterationRecord>& history);

}  // namespace plfem
