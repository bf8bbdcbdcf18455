#include "plfem/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace plfem {

namespace {

Eigen::Vector2d quad_point(const FineMesh& mesh, int k,
                           const std::array<double, 3>& bary) {
  const auto& e = mesh.elements[k];
  return bary[0] * mesh.nodes[e[0]] + bary[1] * mesh.nodes[e[1]] +
         bary[2] * mesh.nodes[e[2]];
}

}  // namespace

// --------------------------------------------------------------------------
// Fields
// --------------------------------------------------------------------------

P1VectorField P1VectorField::zero(const FineMesh& mesh, bool dirichlet) {
  P1VectorField f;
  f.values.assign(mesh.nodes.size(), Eigen::Vector2d::Zero());
  f.dirichlet = dirichlet;
  return f;
}

P1VectorField P1VectorField::sample(const FineMesh& mesh, const VectorFn& fn,
                                    bool dirichlet) {
  P1VectorField f;
  f.values.resize(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) f.values[i] = fn(mesh.nodes[i]);
  f.dirichlet = dirichlet;
  if (dirichlet) f.enforce_dirichlet(mesh);
  return f;
}

void P1VectorField::enforce_dirichlet(const FineMesh& mesh) {
  for (size_t i = 0; i < values.size(); ++i)
    if (mesh.boundary_node[i]) values[i].setZero();
}

P0Field P0Field::zero_fine(const FineMesh& mesh) {
  return P0Field{std::vector<double>(mesh.n_elements(), 0.0), false};
}

P0Field P0Field::zero_macro(const FineMesh& mesh) {
  return P0Field{std::vector<double>(mesh.n_macros(), 0.0), false};
}

double P0Field::mean(const FineMesh& mesh) const {
  const bool fine = values.size() == static_cast<size_t>(mesh.n_elements());
  if (!fine && values.size() != static_cast<size_t>(mesh.n_macros()))
    throw std::invalid_argument("P0Field size matches neither mesh level");
  const std::vector<double>& areas = fine ? mesh.area : mesh.macro_area;
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < values.size(); ++k) {
    num += areas[k] * values[k];
    den += areas[k];
  }
  return num / den;
}

void P0Field::shift_to_zero_mean(const FineMesh& mesh) {
  const double m = mean(mesh);
  for (double& v : values) v -= m;
  zero_mean = true;
}

// --------------------------------------------------------------------------
// Evaluation and gradients
// --------------------------------------------------------------------------

Eigen::Matrix2d p1_gradient(const FineMesh& mesh, int k,
                            const P1VectorField& v) {
  const auto& e = mesh.elements[k];
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 3; ++a)
    G += v.values[e[a]] * mesh.grad_hat[k][a].transpose();
  return G;  // G(i,j) = d v_i / d x_j
}

Eigen::Vector2d eval_p1(const FineMesh& mesh, int k, const P1VectorField& v,
                        const Eigen::Vector2d& x) {
  const auto& e = mesh.elements[k];
  Eigen::Matrix2d T;
  T.col(0) = mesh.nodes[e[1]] - mesh.nodes[e[0]];
  T.col(1) = mesh.nodes[e[2]] - mesh.nodes[e[0]];
  const Eigen::Vector2d lam = T.inverse() * (x - mesh.nodes[e[0]]);
  return (1.0 - lam[0] - lam[1]) * v.values[e[0]] +
         lam[0] * v.values[e[1]] + lam[1] * v.values[e[2]];
}

// --------------------------------------------------------------------------
// Coarse projection
// --------------------------------------------------------------------------

P0Field project_pi_H(const FineMesh& mesh, const P0Field& q) {
  if (q.values.size() != static_cast<size_t>(mesh.n_elements()))
    throw std::invalid_argument("project_pi_H expects a fine P0 field");
  P0Field out = P0Field::zero_macro(mesh);
  for (int k = 0; k < mesh.n_elements(); ++k)
    out.values[mesh.parent_macro[k]] += mesh.area[k] * q.values[k];
  for (int m = 0; m < mesh.n_macros(); ++m) out.values[m] /= mesh.macro_area[m];
  out.zero_mean = q.zero_mean;
  return out;
}

P0Field macro_to_fine(const FineMesh& mesh, const P0Field& qH) {
  if (qH.values.size() != static_cast<size_t>(mesh.n_macros()))
    throw std::invalid_argument("macro_to_fine expects a macro P0 field");
  P0Field out = P0Field::zero_fine(mesh);
  for (int k = 0; k < mesh.n_elements(); ++k)
    out.values[k] = qH.values[mesh.parent_macro[k]];
  out.zero_mean = qH.zero_mean;
  return out;
}

JumpBoundReport jump_seminorm_bound_check(const FineMesh& mesh,
                                          const P0Field& q, double s) {
  const P0Field qH = project_pi_H(mesh, q);
  JumpBoundReport rep;

  std::vector<double> num(mesh.n_macros(), 0.0);  // sum |K||q_K - c_M|^s
  std::vector<double> den(mesh.n_macros(), 0.0);  // sum h_F^2 |[q]|^s
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const int m = mesh.parent_macro[k];
    num[m] += mesh.area[k] * std::pow(std::abs(q.values[k] - qH.values[m]), s);
  }
  for (const Facet& f : mesh.facets) {
    if (f.cls != FacetClass::MacroInterior) continue;
    const double jump = q.values[f.elems[0]] - q.values[f.elems[1]];
    // ||[q]||^s_{0,s,F} = h_F |[q]|^s for constants.
    den[f.macro] += f.length * f.length * std::pow(std::abs(jump), s);
  }

  for (int m = 0; m < mesh.n_macros(); ++m) {
    const double n = std::pow(num[m], 1.0 / s);
    const double d = std::pow(den[m], 1.0 / s);
    if (d == 0.0) {
      ++rep.zero_denominator;
      if (n != 0.0) rep.fluctuation_vanishes = false;
    } else {
      rep.max_ratio = std::max(rep.max_ratio, n / d);
    }
  }
  return rep;
}

// --------------------------------------------------------------------------
// Interpolation
// --------------------------------------------------------------------------

P1VectorField quasi_interpolate(const FineMesh& mesh, const VectorFn& v,
                                bool dirichlet) {
  return P1VectorField::sample(mesh, v, dirichlet);
}

namespace {

// Integral of v . n over a straight segment [a, b] by Gauss quadrature.
double segment_flux(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& n, const VectorFn& v,
                    const FacetRule& rule) {
  const double len = (b - a).norm();
  double acc = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i) {
    const Eigen::Vector2d x = a + rule.points[i] * (b - a);
    acc += rule.weights[i] * v(x).dot(n);
  }
  return len * acc;
}

const MacroFacet& checked_macro_facet(const FineMesh& mesh, int macro_facet) {
  const MacroFacet& f = mesh.macro_facets.at(macro_facet);
  if (f.midpoint_node < 0)
    throw std::runtime_error(
        "fortin: macro facet has no midpoint node; the mesh is not a red "
        "refinement of a macro mesh");
  return f;
}

// Flux of v through a macro facet, integrated per fine sub-facet so that
// fields with a kink at the midpoint node (members of V_h) are handled
// exactly by the rule's polynomial degree.
double macro_facet_flux(const FineMesh& mesh, const MacroFacet& f,
                        const VectorFn& v, const FacetRule& rule) {
  const Eigen::Vector2d& a = mesh.nodes[f.macro_nodes[0]];
  const Eigen::Vector2d& b = mesh.nodes[f.macro_nodes[1]];
  const Eigen::Vector2d& m = mesh.nodes[f.midpoint_node];
  return segment_flux(a, m, f.normal, v, rule) +
         segment_flux(m, b, f.normal, v, rule);
}

}  // namespace

Eigen::Vector2d fortin_facet_correction(const FineMesh& mesh, int macro_facet,
                                        const VectorFn& v, int quad_degree) {
  const MacroFacet& f = checked_macro_facet(mesh, macro_facet);
  const FacetRule rule = FacetRule::gauss(quad_degree);
  const double flux = macro_facet_flux(mesh, f, v, rule);
  // The midpoint hat integrates to |F|/2 along the facet, so this bump
  // carries exactly `flux` through the facet.
  const double c = flux / (0.5 * f.length);
  return c * f.normal;
}

P1VectorField fortin_interpolate(const FineMesh& mesh, const VectorFn& v,
                                 int quad_degree) {
  P1VectorField w = P1VectorField::sample(mesh, v, /*dirichlet=*/true);
  const FacetRule rule = FacetRule::gauss(quad_degree);

  for (size_t i = 0; i < mesh.macro_facets.size(); ++i) {
    const MacroFacet& mf = checked_macro_facet(mesh, static_cast<int>(i));
    if (mf.boundary) continue;
    const double flux_v = macro_facet_flux(mesh, mf, v, rule);
    // Flux of the nodal interpolant: piecewise linear along the two fine
    // sub-facets, Simpson-exact from the three nodal values.
    const Eigen::Vector2d vm = w.values[mf.midpoint_node];
    const Eigen::Vector2d va = w.values[mf.macro_nodes[0]];
    const Eigen::Vector2d vb = w.values[mf.macro_nodes[1]];
    const double flux_w = 0.25 * mf.length * (va + 2.0 * vm + vb).dot(mf.normal);
    const double c = (flux_v - flux_w) / (0.5 * mf.length);
    w.values[mf.midpoint_node] += c * mf.normal;
  }
  return w;
}

// --------------------------------------------------------------------------
// Norms and integrals
// --------------------------------------------------------------------------

double w1r_seminorm(const FineMesh& mesh, const P1VectorField& v, double r) {
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double g = p1_gradient(mesh, k, v).norm();  // Frobenius
    acc += mesh.area[k] * std::pow(g, r);
  }
  return std::pow(acc, 1.0 / r);
}

double lp_norm_p1(const FineMesh& mesh, const P1VectorField& v, double s,
                  int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Eigen::Vector2d val = l[0] * v.values[e[0]] +
                                  l[1] * v.values[e[1]] +
                                  l[2] * v.values[e[2]];
      local += rule.weights[q] * std::pow(val.norm(), s);
    }
    acc += mesh.area[k] * local;
  }
  return std::pow(acc, 1.0 / s);
}

double lp_norm_p0(const FineMesh& mesh, const P0Field& q, double s) {
  const bool fine = q.values.size() == static_cast<size_t>(mesh.n_elements());
  const std::vector<double>& areas = fine ? mesh.area : mesh.macro_area;
  double acc = 0.0;
  for (size_t k = 0; k < q.values.size(); ++k)
    acc += areas[k] * std::pow(std::abs(q.values[k]), s);
  return std::pow(acc, 1.0 / s);
}

double w1r_error(const FineMesh& mesh, const P1VectorField& v,
                 const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>&
                     grad_exact,
                 double r, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const Eigen::Matrix2d G = p1_gradient(mesh, k, v);
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Eigen::Vector2d x = quad_point(mesh, k, rule.points[q]);
      local += rule.weights[q] * std::pow((grad_exact(x) - G).norm(), r);
    }
    acc += mesh.area[k] * local;
  }
  return std::pow(acc, 1.0 / r);
}

double lp_error_p1(const FineMesh& mesh, const P1VectorField& v,
                   const VectorFn& exact, double s, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Eigen::Vector2d x = quad_point(mesh, k, rule.points[q]);
      const Eigen::Vector2d val = l[0] * v.values[e[0]] +
                                  l[1] * v.values[e[1]] +
                                  l[2] * v.values[e[2]];
      local += rule.weights[q] * std::pow((exact(x) - val).norm(), s);
    }
    acc += mesh.area[k] * local;
  }
  return std::pow(acc, 1.0 / s);
}

double lp_error_p0(const FineMesh& mesh, const P0Field& q,
                   const ScalarFn& exact, double s, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    double local = 0.0;
    for (size_t qi = 0; qi < rule.points.size(); ++qi) {
      const Eigen::Vector2d x = quad_point(mesh, k, rule.points[qi]);
      local += rule.weights[qi] *
               std::pow(std::abs(exact(x) - q.values[k]), s);
    }
    acc += mesh.area[k] * local;
  }
  return std::pow(acc, 1.0 / s);
}

double integrate(const FineMesh& mesh, const ScalarFn& f, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      local += rule.weights[q] * f(quad_point(mesh, k, rule.points[q]));
    acc += mesh.area[k] * local;
  }
  return acc;
}

}  // namespace plfem
