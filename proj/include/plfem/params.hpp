// ============================================================================
// params.hpp
//
// Exponent bookkeeping for the power-law (shear-dependent) Stokes problem
//
//   -div(|∇u|^{r-2} ∇u) + div(u ⊗ u) + ∇p = f,   div u = 0,
//
// posed with homogeneous Dirichlet velocity data on a polytope in R^d.
// Everything downstream (stabilisation weights, lifting, error norms) is
// driven by a handful of exponents derived from r and d:
//
//   r'      conjugate exponent r/(r-1)
//   r*      Sobolev embedding exponent dr/(d-r), infinite once r >= d
//   r~      min{ r', r*/2 }, the largest exponent for which the convective
//           pairing stays integrable
//   alpha   facet stabilisation power: tau_F = h_F^alpha
//
// The admissible range is r > 2d/(d+2); below that the convective term is
// no longer well defined for the natural function spaces.
// ============================================================================

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace plfem {

// Sobolev embedding exponent; infinite for r >= d, so the value is tagged
// rather than encoded as a sentinel float.
struct SobolevExponent {
  bool infinite = false;
  double value = 0.0;  // meaningful only when !infinite

  static SobolevExponent finite(double v) { return SobolevExponent{false, v}; }
  static SobolevExponent inf() { return SobolevExponent{true, 0.0}; }
};

// Lower admissibility bound 2d/(d+2).
double admissibility_bound(int d);

// r' = r/(r-1).
double conjugate_exponent(double r);

// r* = dr/(d-r) for r < d, infinite otherwise.
SobolevExponent sobolev_exponent(double r, int d);

// r~ = min{ r', r*/2 }.  Peaks at 3d/(2d-2) when r = 3d/(d+2).
double critical_exponent(double r, int d);

// Piecewise stabilisation power
//   alpha = 1                  for r >= 2
//   alpha = 1 - d + 2d/r~      for 3d/(d+2) <= r < 2
//   alpha = (d-1)/3            for 2d/(d+2) < r < 3d/(d+2)
// Continuous across both branch points.
double alpha_exponent(double r, int d);

// Bundle of all derived exponents plus the viscosity regularisation used by
// both the solver and the manufactured-forcing evaluation.
struct PowerLawParams {
  int d = 2;
  double r = 2.0;
  double r_conj = 2.0;
  SobolevExponent r_star;
  double r_tilde = 2.0;
  double alpha = 1.0;
  double epsilon_reg = 0.0;

  // Validates r > 2d/(d+2) and derives every dependent exponent.  When no
  // epsilon is supplied the default is 1e-8 for r < 2 (degenerate viscosity
  // at vanishing shear) and 0 otherwise.
  static PowerLawParams make(double r, int d = 2,
                             std::optional<double> epsilon = std::nullopt);

  // CSV comment lines recording the exponents, prepended to every report so
  // each experiment is self-describing.
  std::vector<std::string> report_header() const;
};

}  // namespace plfem
