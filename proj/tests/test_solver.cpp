// Fixed-point solver behaviour: trivial forcing, a frozen iteration count,
// the discrete energy identity, linear saddle solves with their scaling, the
// damped-iteration monotonicity, honest non-convergence reports, and the
// iteration log format.

#include <doctest.h>

#include "plfem/manufactured.hpp"
#include "plfem/solver.hpp"
#include "plfem/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace plfem;

namespace {

StabilisedSystem build_system(const FineMesh& mesh, const RT0Basis& rt,
                              const PowerLawParams& prm,
                              const P1VectorField& u_k, const LiftedField& beta,
                              const VectorFn& f) {
  StabilisedSystem sys;
  sys.dofs = VelocityDofMap::build(mesh);
  const ViscousBlock vb = assemble_viscous(mesh, sys.dofs, u_k, prm);
  sys.A = vb.A;
  sys.nu_min = vb.nu_min;
  sys.nu_max = vb.nu_max;
  sys.N = assemble_convection(mesh, sys.dofs, rt, beta);
  sys.B = assemble_divergence(mesh, sys.dofs);
  sys.S = assemble_stab_matrix(mesh, prm);
  sys.rhs = assemble_rhs(mesh, sys.dofs, f);
  sys.areas.resize(mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k) sys.areas(k) = mesh.area[k];
  return sys;
}

}  // namespace

TEST_CASE("zero forcing converges immediately to the zero state") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(1.5);
  const SolutionState st = picard_solve(
      mesh, rt, prm, [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); },
      SolverConfig{});

  CHECK(st.converged);
  CHECK(st.history.size() == 1);
  CHECK(st.multiplier == 0.0);
  for (const auto& v : st.u.values) CHECK(v.norm() == 0.0);
  for (double q : st.p.values) CHECK(q == 0.0);

  const AprioriReport rep = apriori_quantities(mesh, rt, prm, st);
  CHECK(rep.u_energy == 0.0);
  CHECK(rep.lift_norm == 0.0);
  CHECK(rep.stab_energy == 0.0);
  CHECK(rep.p_norm == 0.0);
}

TEST_CASE("Newtonian benchmark: iteration count, energy identity, residual") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(2.0);
  const ManufacturedCase mc = case_M1();
  const VectorFn f = forcing_function(mc, prm);
  const SolverConfig cfg;
  const SolutionState st = picard_solve(mesh, rt, prm, f, cfg);

  CHECK(st.converged);
  // Stokes start plus two corrections on this mesh; recorded at first build.
  CHECK(st.history.size() == 3);
  CHECK(std::abs(st.multiplier) <= 1e-12);
  CHECK(std::abs(st.p.mean(mesh)) <= 1e-12 * lp_norm_p0(mesh, st.p, 2.0));

  // Testing the momentum equation with u_h kills the convective term (the
  // advecting field is divergence free), leaving |u|^r + s(p,p) = <f, u>.
  const VelocityDofMap dofs = VelocityDofMap::build(mesh);
  const double load = assemble_rhs(mesh, dofs, f, cfg.rhs_quad_degree)
                          .dot(velocity_coeffs(mesh, dofs, st.u));
  const double energy = std::pow(w1r_seminorm(mesh, st.u, prm.r), prm.r) +
                        stab_form(mesh, st.p, st.p, prm);
  CHECK(std::abs(energy - load) <= 1e-9 * std::abs(load));

  // The state satisfies the nonlinear system assembled from the public
  // blocks, not just the solver's internal ones.
  const StabilisedSystem sys =
      build_system(mesh, rt, prm, st.u, lift(mesh, st.u, st.p, prm), f);
  const NonlinearResidual res = nonlinear_residual(mesh, rt, prm, sys, st.u, st.p);
  CHECK(res.scaled_max <= cfg.tolerance);
}

TEST_CASE("linear saddle solve: residual, multiplier, exact load scaling") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(2.0);
  const ManufacturedCase mc = case_M1();
  const LiftedField no_wind{P1VectorField::zero(mesh),
                            std::vector<double>(mesh.n_facets(), 0.0)};
  StabilisedSystem sys = build_system(mesh, rt, prm, P1VectorField::zero(mesh),
                                      no_wind, forcing_function(mc, prm));
  sys.N.setZero();

  const SaddleSolution s1 = linear_saddle_solve(sys, 1e-10);
  CHECK(s1.rel_residual <= 1e-10);
  CHECK(std::abs(s1.lambda) <= 1e-12 * s1.p.lpNorm<Eigen::Infinity>());
  CHECK(std::abs(sys.areas.dot(s1.p)) <= 1e-12 * s1.p.lpNorm<Eigen::Infinity>());

  sys.rhs *= 2.0;
  const SaddleSolution s2 = linear_saddle_solve(sys, 1e-10);
  CHECK((s2.u - 2.0 * s1.u).lpNorm<Eigen::Infinity>() <=
        1e-12 * s1.u.lpNorm<Eigen::Infinity>());
  CHECK((s2.p - 2.0 * s1.p).lpNorm<Eigen::Infinity>() <=
        1e-12 * s1.p.lpNorm<Eigen::Infinity>());
}

TEST_CASE("solver is deterministic: repeated solves are bit-identical") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(1.5);
  const VectorFn f = forcing_function(case_M1(), prm);
  const SolutionState a = picard_solve(mesh, rt, prm, f, SolverConfig{});
  const SolutionState b = picard_solve(mesh, rt, prm, f, SolverConfig{});

  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].residual == b.history[i].residual);
    CHECK(a.history[i].nu_min == b.history[i].nu_min);
    CHECK(a.history[i].nu_max == b.history[i].nu_max);
    CHECK(a.history[i].s_php == b.history[i].s_php);
  }
  for (int i = 0; i < mesh.n_nodes(); ++i)
    CHECK((a.u.values[i] - b.u.values[i]).norm() == 0.0);
  for (int k = 0; k < mesh.n_elements(); ++k)
    CHECK(a.p.values[k] == b.p.values[k]);
  CHECK(a.multiplier == b.multiplier);
}

TEST_CASE("damped iteration: theta = 1/2 decreases the residual strictly") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const ManufacturedCase mc = case_M1();
  for (double r : {1.5, 2.0, 2.5}) {
    CAPTURE(r);
    const PowerLawParams prm = PowerLawParams::make(r);
    SolverConfig cfg;
    cfg.theta = 0.5;
    const SolutionState st =
        picard_solve(mesh, rt, prm, forcing_function(mc, prm), cfg);
    CHECK(st.converged);
    REQUIRE(st.history.size() >= 2);
    for (size_t i = 1; i < st.history.size(); ++i)
      CHECK(st.history[i].residual < st.history[i - 1].residual);
  }
}

TEST_CASE("non-convergence is reported, never silent") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(1.5);
  SolverConfig cfg;
  cfg.max_iterations = 2;
  const SolutionState st =
      picard_solve(mesh, rt, prm, forcing_function(case_M1(), prm), cfg);
  CHECK(!st.converged);
  CHECK(st.history.size() == 2);
  CHECK(!st.message.empty());
}

TEST_CASE("iteration log: exponent header, column line, one row per sweep") {
  const FineMesh mesh = level_mesh(2, 0);
  const RT0Basis rt = RT0Basis::build(mesh);
  const PowerLawParams prm = PowerLawParams::make(1.5);
  const SolutionState st =
      picard_solve(mesh, rt, prm, forcing_function(case_M1(), prm), SolverConfig{});

  const std::string path = "test_iteration_log.csv";
  write_iteration_log(path, prm, st.history);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  std::remove(path.c_str());

  REQUIRE(lines.size() == 8 + st.history.size());
  CHECK(lines[0] == "# d = 2");
  CHECK(lines[1] == "# r = 1.5");
  CHECK(lines[7] == "iter,residual,nu_min,nu_max,s_php");
  for (size_t i = 0; i < st.history.size(); ++i) {
    std::istringstream row(lines[8 + i]);
    std::string field;
    std::getline(row, field, ',');
    CHECK(std::stoi(field) == st.history[i].iter);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == st.history[i].residual);
  }
}
