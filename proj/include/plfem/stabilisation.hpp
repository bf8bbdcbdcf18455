// ============================================================================
// stabilisation.hpp
//
// Pressure-jump stabilisation on the interior facets of the macro cells and
// the lowest-order Raviart-Thomas lifting built from the same jumps.
//
// The stabilising form acts on fine P0 pressures:
//
//   s(q, t) = sum_M sum_{F in F_I(M)} tau_F ([q], [t])_F,   tau_F = h_F^alpha,
//
// with jumps [q]_F = q(K+) - q(K-) signed by the stored facet normal
// (pointing out of K+).  It is symmetric positive semidefinite; its kernel
// is exactly the fields that are constant on every macro cell, so it never
// sees the coarse pressure space.
//
// The lifting augments a P1 velocity by facet RT0 modes,
//
//   L(v, q) = v + sum_M sum_{F in F_I(M)} tau_F [q]_F phi_F,
//
// where phi_F is the RT0 basis field with unit normal trace on F and
// vanishing normal trace on every other facet.  At a discrete solution the
// element divergence of L(u_h, p_h) vanishes identically: the mass equation
// tested with an element indicator gives (div u_h, 1)_K = -s(p_h, chi_K),
// which is exactly the RT flux the jump modes put back.
// ============================================================================

#pragma once

#include "plfem/mesh.hpp"
#include "plfem/params.hpp"
#include "plfem/spaces.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace plfem {

// Facet stabilisation weight tau_F = h_F^alpha.
double tau_facet(double h_F, const PowerLawParams& params);

// Stabilising bilinear form s(q, t); exact (all integrands are constants).
double stab_form(const FineMesh& mesh, const P0Field& q, const P0Field& t,
                 const PowerLawParams& params);

// Matrix of s on the fine P0 basis.
Eigen::SparseMatrix<double> assemble_stab_matrix(const FineMesh& mesh,
                                                 const PowerLawParams& params);

// --------------------------------------------------------------------------
// RT0 basis and lifting
// --------------------------------------------------------------------------

// Per-facet RT0 data: on each adjacent element K,
//   phi_F|_K (x) = sign * |F| / (d |K|) * (x - x_opp),
// where x_opp is the vertex of K opposite F and sign = +1 on the element the
// facet normal exits.  div phi_F|_K = sign |F| / |K|.
struct RT0Basis {
  struct Side {
    int elem = -1;
    int opp_node = -1;
    double signed_coeff = 0.0;  // sign * |F| / (d |K|)
  };
  std::vector<std::array<Side, 2>> facet;  // [1].elem = -1 on the boundary

  static RT0Basis build(const FineMesh& mesh);

  // phi_F on element k (one of the facet's sides) at point x.
  Eigen::Vector2d eval(const FineMesh& mesh, int facet_id, int k,
                       const Eigen::Vector2d& x) const;
};

// P1 velocity plus RT0 facet modes; rt_coeffs is indexed by facet and is
// nonzero only on macro-interior facets.
struct LiftedField {
  P1VectorField p1;
  std::vector<double> rt_coeffs;
};

// L(v, q) with coefficients tau_F [q]_F on the interior facets.
LiftedField lift(const FineMesh& mesh, const P1VectorField& v,
                 const P0Field& q, const PowerLawParams& params);

// Value of a lifted field inside element k.
Eigen::Vector2d eval_lifted(const FineMesh& mesh, const RT0Basis& rt,
                            const LiftedField& L, int k,
                            const Eigen::Vector2d& x);

// Element divergence of a lifted field (constant per element; exact).
P0Field lifted_divergence(const FineMesh& mesh, const RT0Basis& rt,
                          const LiftedField& L);

// ||L||_{0,s} by element quadrature (the RT part is linear per element).
double lp_norm_lifted(const FineMesh& mesh, const RT0Basis& rt,
                      const LiftedField& L, double s, int quad_degree = 7);

// The three quantities the lifting is controlled by; used to watch that the
// RT augmentation never degrades the velocity scale it rides on.
struct LiftStabilityReport {
  double lift_norm = 0.0;      // ||L(v,q)||_{0,2r~}
  double v_seminorm = 0.0;     // |v|_{1,r}
  double stab_energy = 0.0;    // s(q,q)^{1/2}
};

LiftStabilityReport lift_stability_report(const FineMesh& mesh,
                                          const RT0Basis& rt,
                                          const P1VectorField& v,
                                          const P0Field& q,
                                          const PowerLawParams& params);

}  // namespace plfem
