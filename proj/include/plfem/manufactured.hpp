// ============================================================================
// manufactured.hpp
//
// Closed-form benchmark solutions on the unit square and the forcing that
// makes them exact solutions of
//
//   -div(|grad u|^{r-2} grad u) + div(u x u) + grad p = f,   div u = 0,
//
// with u = 0 on the boundary.  The viscous contribution to f is obtained by
// central finite differences of the analytic flux with Richardson
// extrapolation; the convective and pressure parts are analytic.  The flux
// uses the same epsilon-regularised viscosity as the solver, so both sides
// of a convergence study discretise the same constitutive law.
// ============================================================================

#pragma once

#include "plfem/params.hpp"
#include "plfem/spaces.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace plfem {

struct ManufacturedCase {
  std::string name;
  VectorFn velocity;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> velocity_gradient;
  VectorFn velocity_laplacian;  // for the analytic r = 2 cross-check
  ScalarFn pressure;
  VectorFn pressure_gradient;
};

// M1: u = curl(x^2 (1-x)^2 y^2 (1-y)^2), p = sin(2 pi x) sin(2 pi y).
// Divergence-free, vanishing velocity on the boundary, zero-mean pressure.
ManufacturedCase case_M1();

// M0: u = 0 with the same pressure; the forcing reduces to grad p exactly.
ManufacturedCase case_M0();

// Lookup by name ("M1", "M0"); throws on unknown names listing the choices.
ManufacturedCase find_case(const std::string& name);

// Power-law flux (|G|^2 + eps^2)^{(r-2)/2} G; the zero-gradient limit is the
// zero matrix for every admissible r.
Eigen::Matrix2d powerlaw_flux(const Eigen::Matrix2d& G,
                              const PowerLawParams& params);

// f(x) = -div flux(grad u) + (u . grad) u + grad p, the flux divergence by
// Richardson-extrapolated central differences of step delta.  The point must
// keep a margin of 2 * delta from the domain boundary.
Eigen::Vector2d forcing_oracle(const ManufacturedCase& mc,
                               const Eigen::Vector2d& x,
                               const PowerLawParams& params,
                               double delta = 1e-5);

// The forcing as a plain callable for assembly.
VectorFn forcing_function(const ManufacturedCase& mc,
                          const PowerLawParams& params, double delta = 1e-5);

}  // namespace plfem
