// ============================================================================
// assembly.hpp
//
// Algebraic blocks of the stabilised saddle-point system.  Unknowns are the
// interior P1 velocity values (two components per free node), all fine P0
// pressures, and one scalar multiplier pinning the pressure mean.  For a
// frozen viscosity field nu and frozen advecting field beta the linearised
// system reads
//
//   [ A(nu) + N(beta)   -B^T    0 ] [u]   [rhs]
//   [       B             S     a ] [p] = [ 0 ]
//   [       0            a^T    0 ] [l]   [ 0 ]
//
// with A the nu-weighted vector Laplacian, N the (non-skew-symmetrised)
// convection block -(beta x u, grad v), B the divergence pairing
// (q, div u), S the facet-jump stabilisation and a the element areas.
// Every block is assembled with quadrature that is exact for its integrand,
// and assembly is sequential, so repeated runs produce bit-identical
// matrices.
// ============================================================================

#pragma once

#include "plfem/mesh.hpp"
#include "plfem/params.hpp"
#include "plfem/spaces.hpp"
#include "plfem/stabilisation.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace plfem {

// Velocity degrees of freedom: components (node, 0) and (node, 1) of every
// interior node, numbered 2*slot and 2*slot+1.
struct VelocityDofMap {
  std::vector<int> slot_of_node;  // -1 for boundary nodes
  std::vector<int> node_of_slot;

  static VelocityDofMap build(const FineMesh& mesh);
  int n_dofs() const { return 2 * static_cast<int>(node_of_slot.size()); }
  int dof(int node, int comp) const { return 2 * slot_of_node[node] + comp; }
};

// Regularised viscosity nu = (|G|^2 + eps^2)^{(r-2)/2}; |G| is the Frobenius
// norm.  Throws when the value is not finite (degenerate gradient with r < 2
// and eps = 0), naming the cure.
double regularised_viscosity(double grad_norm_sq, const PowerLawParams& params);

struct ViscousBlock {
  Eigen::SparseMatrix<double> A;
  double nu_min = 0.0;
  double nu_max = 0.0;
};

// A[(a,c),(b,c)] = int nu grad hat_a . grad hat_b, components uncoupled;
// nu is constant per element (P1 gradients), so the block is exact.
ViscousBlock assemble_viscous(const FineMesh& mesh, const VelocityDofMap& dofs,
                              const P1VectorField& u_k,
                              const PowerLawParams& params);

// N[(a,c),(b,c)] = -int (beta . grad hat_a) hat_b with beta the lifted field
// of the previous iterate; the integrand has degree two, integrated exactly.
Eigen::SparseMatrix<double> assemble_convection(const FineMesh& mesh,
                                                const VelocityDofMap& dofs,
                                                const RT0Basis& rt,
                                                const LiftedField& beta);

// B[K,(b,c)] = int_K d_c hat_b  (exact).
Eigen::SparseMatrix<double> assemble_divergence(const FineMesh& mesh,
                                                const VelocityDofMap& dofs);

// Load vector <f, hat_a e_c> by element quadrature of the given degree.
Eigen::VectorXd assemble_rhs(const FineMesh& mesh, const VelocityDofMap& dofs,
                             const VectorFn& f, int quad_degree = 7);

// All blocks of the linearised system for one Picard step.
struct StabilisedSystem {
  VelocityDofMap dofs;
  Eigen::SparseMatrix<double> A;  // viscous
  Eigen::SparseMatrix<double> N;  // convection
  Eigen::SparseMatrix<double> B;  // divergence pairing
  Eigen::SparseMatrix<double> S;  // stabilisation
  Eigen::VectorXd rhs;            // velocity load
  Eigen::VectorXd areas;          // mean-constraint row
  double nu_min = 0.0;
  double nu_max = 0.0;
};

// Coefficient vectors of a state in the dof numbering.
Eigen::VectorXd velocity_coeffs(const FineMesh& mesh,
                                const VelocityDofMap& dofs,
                                const P1VectorField& u);
P1VectorField velocity_from_coeffs(const FineMesh& mesh,
                                   const VelocityDofMap& dofs,
                                   const Eigen::VectorXd& coeffs);

// Nonlinear residual of the discrete problem at state (u, p): the momentum
// block is re-assembled around the state itself, so
//   R_u = [A(u) + N(L(u,p))] u - B^T p - rhs,    R_p = B u + S p.
struct NonlinearResidual {
  Eigen::VectorXd momentum;
  Eigen::VectorXd mass;
  // max-norm of both blocks over the max-norm of the load vector.
  double scaled_max = 0.0;
};

NonlinearResidual nonlinear_residual(const FineMesh& mesh, const RT0Basis& rt,
                                     const PowerLawParams& params,
                                     const StabilisedSystem& sys,
                                     const P1VectorField& u, const P0Field& p);

}  // namespace plfem
