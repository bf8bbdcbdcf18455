// ============================================================================
// quadrature.hpp
//
// Gauss quadrature on the reference triangle and the unit interval.
//
// Triangle rules are conical products: a Gauss-Jacobi rule (weight 1-x) in
// the first direction times a Gauss-Legendre rule in the second, collapsed
// onto the triangle.  Both 1D rules come from the Golub-Welsch eigenvalue
// construction, so rules of arbitrary exactness degree are available and all
// weights are positive.  Weights are normalised to sum to one: an integral
// over a physical cell K is |K| * sum_i w_i f(x_i).
// ============================================================================

#pragma once

#include <array>
#include <vector>

namespace plfem {

// Rule on the reference triangle, points stored barycentrically.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;  // (l0, l1, l2), sum = 1
  std::vector<double> weights;                // sum = 1
  int degree = 0;                             // all polynomials of this total
                                              // degree integrate exactly

  static QuadratureRule triangle(int degree);
};

// Gauss-Legendre rule on [0,1]; weights sum to one, so an integral over a
// facet F is |F| * sum_i w_i f(x(t_i)).
struct FacetRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  static FacetRule gauss(int degree);
};

}  // namespace plfem
