// ============================================================================
// spaces.hpp
//
// Discrete fields and interpolation operators on the two-level mesh:
//
//   V_h  continuous piecewise-linear (P1) vector fields, homogeneous
//        Dirichlet trace when the mask is active;
//   Q_h  piecewise-constant (P0) pressures on the fine mesh;
//   Q_H  piecewise-constant pressures on the macro mesh.
//
// Besides basic evaluation and norms this header hosts the two operators the
// pressure analysis is built on: the L2 projection onto Q_H and a Fortin
// interpolant that preserves element-mean divergence against Q_H.  The
// Fortin corrector bumps the velocity at the midpoint node of every
// interior macro facet so that the facet flux of the interpolant matches
// the flux of the argument; each facet is visited once, which makes the
// per-macro-cell flux budget telescope.
// ============================================================================

#pragma once

#include "plfem/mesh.hpp"
#include "plfem/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace plfem {

using VectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
using ScalarFn = std::function<double(const Eigen::Vector2d&)>;

// --------------------------------------------------------------------------
// Fields
// --------------------------------------------------------------------------

struct P1VectorField {
  std::vector<Eigen::Vector2d> values;  // one per fine node
  bool dirichlet = true;                // homogeneous boundary trace enforced

  static P1VectorField zero(const FineMesh& mesh, bool dirichlet = true);
  // Nodal interpolation; zeroes boundary nodes when dirichlet is set.
  static P1VectorField sample(const FineMesh& mesh, const VectorFn& f,
                              bool dirichlet = true);
  void enforce_dirichlet(const FineMesh& mesh);
};

struct P0Field {
  std::vector<double> values;  // per fine element, or per macro cell
  bool zero_mean = false;

  static P0Field zero_fine(const FineMesh& mesh);
  static P0Field zero_macro(const FineMesh& mesh);
  // Area-weighted mean; the field size selects fine or macro areas.
  double mean(const FineMesh& mesh) const;
  void shift_to_zero_mean(const FineMesh& mesh);
};

// --------------------------------------------------------------------------
// Evaluation and gradients
// --------------------------------------------------------------------------

// Gradient of a P1 vector field on element k, Jacobian convention:
// G(i,j) = d v_i / d x_j.  Constant per element.
Eigen::Matrix2d p1_gradient(const FineMesh& mesh, int k,
                            const P1VectorField& v);

// Value at an arbitrary point of element k (barycentric interpolation).
Eigen::Vector2d eval_p1(const FineMesh& mesh, int k, const P1VectorField& v,
                        const Eigen::Vector2d& x);

// --------------------------------------------------------------------------
// Coarse projection
// --------------------------------------------------------------------------

// L2 projection of a fine P0 field onto macro constants: the area-weighted
// mean over each macro cell.  Idempotent on macro-constant input.
P0Field project_pi_H(const FineMesh& mesh, const P0Field& q);

// Inclusion Q_H -> Q_h (children inherit the parent value).
P0Field macro_to_fine(const FineMesh& mesh, const P0Field& qH);

// Per-macro-cell ratio  ||q - Pi_H q||_{0,s,M} / (sum_F h_F ||[q]||^s_F)^{1/s}
// over the interior facets F_I(M); the mesh-independent bound on this ratio
// is what makes the facet jumps control the fluctuation.
struct JumpBoundReport {
  double max_ratio = 0.0;       // over macro cells with a nonzero denominator
  int zero_denominator = 0;     // macro cells where all jumps vanish
  bool fluctuation_vanishes = true;  // numerator zero whenever denominator is
};

JumpBoundReport jump_seminorm_bound_check(const FineMesh& mesh,
                                          const P0Field& q, double s);

// --------------------------------------------------------------------------
// Interpolation
// --------------------------------------------------------------------------

// Stand-in quasi-interpolant: pointwise nodal interpolation (the argument is
// assumed continuous), boundary nodes zeroed when dirichlet is set.
P1VectorField quasi_interpolate(const FineMesh& mesh, const VectorFn& v,
                                bool dirichlet = true);

// Fortin corrector on one interior macro facet: the nodal bump at the facet
// midpoint whose flux through the facet equals the flux of v.  Facets
// without a midpoint node violate the two-level assumption and are a hard
// error.
Eigen::Vector2d fortin_facet_correction(const FineMesh& mesh, int macro_facet,
                                        const VectorFn& v, int quad_degree);

// Divergence-preserving interpolant I(v) = S_h(v) + correction, where the
// correction restores, facet by interior macro facet, the flux of v - S_h(v).
// Satisfies (div I(v), q_H) = (div v, q_H) for all macro-constant q_H
// whenever the facet quadrature resolves v exactly and v vanishes on the
// domain boundary.
P1VectorField fortin_interpolate(const FineMesh& mesh, const VectorFn& v,
                                 int quad_degree = 9);

// --------------------------------------------------------------------------
// Norms and integrals
// --------------------------------------------------------------------------

// |v|_{1,r}: broken W^{1,r} seminorm of a P1 field (exact, gradients are
// piecewise constant; Frobenius norm on the gradient).
double w1r_seminorm(const FineMesh& mesh, const P1VectorField& v, double r);

// ||v||_{0,s} of a P1 field by element quadrature.
double lp_norm_p1(const FineMesh& mesh, const P1VectorField& v, double s,
                  int quad_degree = 7);

// ||q||_{0,s} of a P0 field (exact).
double lp_norm_p0(const FineMesh& mesh, const P0Field& q, double s);

// Error norms against analytic fields, by element quadrature.
double w1r_error(const FineMesh& mesh, const P1VectorField& v,
                 const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>&
                     grad_exact,
                 double r, int quad_degree = 7);
double lp_error_p1(const FineMesh& mesh, const P1VectorField& v,
                   const VectorFn& exact, double s, int quad_degree = 7);
double lp_error_p0(const FineMesh& mesh, const P0Field& q,
                   const ScalarFn& exact, double s, int quad_degree = 7);

// Integral of a scalar function over the domain by element quadrature.
double integrate(const FineMesh& mesh, const ScalarFn& f, int quad_degree = 7);

}  // namespace plfem
