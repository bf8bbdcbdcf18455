#include "plfem/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plfem {

SaddleSolution linear_saddle_solve(const StabilisedSystem& sys,
                                   double linear_tolerance) {
  const int n_u = sys.dofs.n_dofs();
  const int n_p = static_cast<int>(sys.areas.size());
  const int n = n_u + n_p + 1;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.A.nonZeros() + sys.N.nonZeros() + 2 * sys.B.nonZeros() +
               sys.S.nonZeros() + 2 * n_p);

  auto add_block = [&trip](const Eigen::SparseMatrix<double>& M, int row0,
                           int col0, double scale) {
    for (int k = 0; k < M.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
        trip.emplace_back(row0 + it.row(), col0 + it.col(),
                          scale * it.value());
  };

  add_block(sys.A, 0, 0, 1.0);
  if (sys.N.nonZeros() > 0) add_block(sys.N, 0, 0, 1.0);
  add_block(sys.B, n_u, 0, 1.0);
  add_block(sys.S, n_u, n_u, 1.0);
  // -B^T couples pressure into momentum.
  for (int k = 0; k < sys.B.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.B, k); it; ++it)
      trip.emplace_back(it.col(), n_u + it.row(), -it.value());
  // Mean constraint.
  for (int k = 0; k < n_p; ++k) {
    trip.emplace_back(n_u + k, n_u + n_p, sys.areas[k]);
    trip.emplace_back(n_u + n_p, n_u + k, sys.areas[k]);
  }

  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b.head(n_u) = sys.rhs;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error(
        "saddle solve: LU factorisation failed (" + lu.lastErrorMessage() +
        "); the linearised system is singular");
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("saddle solve: LU back-substitution failed");

  SaddleSolution sol;
  sol.u = x.head(n_u);
  sol.p = x.segment(n_u, n_p);
  sol.lambda = x[n_u + n_p];

  const double b_norm = b.lpNorm<Eigen::Infinity>();
  const double res = (M * x - b).lpNorm<Eigen::Infinity>();
  sol.rel_residual = (b_norm > 0.0) ? res / b_norm : res;
  if (!(sol.rel_residual <= linear_tolerance)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "saddle solve: relative residual %.3e exceeds the linear "
                  "tolerance %.3e",
                  sol.rel_residual, linear_tolerance);
    throw std::runtime_error(msg);
  }
  return sol;
}

namespace {

P0Field pressure_from_coeffs(const FineMesh& mesh, const Eigen::VectorXd& pc) {
  P0Field p = P0Field::zero_fine(mesh);
  for (int k = 0; k < mesh.n_elements(); ++k) p.values[k] = pc[k];
  p.zero_mean = true;
  return p;
}

}  // namespace

SolutionState picard_solve(const FineMesh& mesh, const RT0Basis& rt,
                           const PowerLawParams& params, const VectorFn& f,
                           const SolverConfig& config) {
  StabilisedSystem sys;
  sys.dofs = VelocityDofMap::build(mesh);
  sys.B = assemble_divergence(mesh, sys.dofs);
  sys.S = assemble_stab_matrix(mesh, params);
  sys.rhs = assemble_rhs(mesh, sys.dofs, f, config.rhs_quad_degree);
  sys.areas = Eigen::Map<const Eigen::VectorXd>(mesh.area.data(),
                                                mesh.area.size());

  const double theta = config.resolved_theta(params);

  SolutionState state;
  state.u = P1VectorField::zero(mesh);
  state.p = P0Field::zero_fine(mesh);

  auto record = [&](int iter) {
    // Residual assembles the viscous block at the current state; reuse its
    // viscosity range for the log.
    const ViscousBlock visc = assemble_viscous(mesh, sys.dofs, state.u, params);
    sys.nu_min = visc.nu_min;
    sys.nu_max = visc.nu_max;
    const NonlinearResidual res =
        nonlinear_residual(mesh, rt, params, sys, state.u, state.p);
    IterationRecord rec;
    rec.iter = iter;
    rec.residual = res.scaled_max;
    rec.nu_min = visc.nu_min;
    rec.nu_max = visc.nu_max;
    rec.s_php = stab_form(mesh, state.p, state.p, params);
    state.history.push_back(rec);
    return res.scaled_max;
  };

  // Sweep 1: Stokes (unit viscosity, no convection) to seed the iteration.
  {
    StabilisedSystem stokes = sys;
    const PowerLawParams newtonian = PowerLawParams::make(2.0, params.d);
    stokes.A =
        assemble_viscous(mesh, sys.dofs, state.u, newtonian).A;
    stokes.N.resize(sys.dofs.n_dofs(), sys.dofs.n_dofs());
    const SaddleSolution sol =
        linear_saddle_solve(stokes, config.linear_tolerance);
    state.u = velocity_from_coeffs(mesh, sys.dofs, sol.u);
    state.p = pressure_from_coeffs(mesh, sol.p);
    state.multiplier = sol.lambda;
  }
  double residual = record(1);

  for (int iter = 2; iter <= config.max_iterations; ++iter) {
    if (residual <= config.tolerance) break;
    const ViscousBlock visc =
        assemble_viscous(mesh, sys.dofs, state.u, params);
    sys.A = visc.A;
    const LiftedField beta = lift(mesh, state.u, state.p, params);
    sys.N = assemble_convection(mesh, sys.dofs, rt, beta);
    const SaddleSolution sol = linear_saddle_solve(sys, config.linear_tolerance);

    const Eigen::VectorXd u_prev = velocity_coeffs(mesh, sys.dofs, state.u);
    const Eigen::VectorXd p_prev = Eigen::Map<const Eigen::VectorXd>(
        state.p.values.data(), state.p.values.size());
    const Eigen::VectorXd u_next = theta * sol.u + (1.0 - theta) * u_prev;
    const Eigen::VectorXd p_next = theta * sol.p + (1.0 - theta) * p_prev;

    state.u = velocity_from_coeffs(mesh, sys.dofs, u_next);
    state.p = pressure_from_coeffs(mesh, p_next);
    state.multiplier = sol.lambda;
    residual = record(iter);
  }

  state.converged = residual <= config.tolerance;
  if (state.converged) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "converged in %zu iterations, residual %.3e",
                  state.history.size(), residual);
    state.message = msg;
  } else {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "no convergence after %zu iterations: residual %.3e > "
                  "tolerance %.3e",
                  state.history.size(), residual, config.tolerance);
    state.message = msg;
  }
  return state;
}

AprioriReport apriori_quantities(const FineMesh& mesh, const RT0Basis& rt,
                                 const PowerLawParams& params,
                                 const SolutionState& state) {
  AprioriReport rep;
  rep.u_energy = std::pow(w1r_seminorm(mesh, state.u, params.r), params.r);
  const LiftedField L = lift(mesh, state.u, state.p, params);
  rep.lift_norm = lp_norm_lifted(mesh, rt, L, 2.0 * params.r_tilde);
  rep.stab_energy = stab_form(mesh, state.p, state.p, params);
  rep.p_norm = lp_norm_p0(mesh, state.p, params.r_tilde);
  return rep;
}

void write_iteration_log(const std::string& path, const PowerLawParams& params,
                         const std::vector<IterationRecord>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (const std::string& line : params.report_header()) out << line << "\n";
  out << "iter,residual,nu_min,nu_max,s_php\n";
  char buf[160];
  for (const IterationRecord& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                  r.residual, r.nu_min, r.nu_max, r.s_php);
    out << buf;
  }
}

}  // namespace plfem
