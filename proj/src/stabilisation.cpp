#include "plfem/stabilisation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace plfem {

double tau_facet(double h_F, const PowerLawParams& params) {
  return std::pow(h_F, params.alpha);
}

namespace {

void check_fine_p0(const FineMesh& mesh, const P0Field& q, const char* who) {
  if (q.values.size() != static_cast<size_t>(mesh.n_elements()))
    throw std::invalid_argument(std::string(who) +
                                " expects a fine-mesh P0 field");
}

}  // namespace

double stab_form(const FineMesh& mesh, const P0Field& q, const P0Field& t,
                 const PowerLawParams& params) {
  check_fine_p0(mesh, q, "stab_form");
  check_fine_p0(mesh, t, "stab_form");
  double acc = 0.0;
  for (const Facet& f : mesh.facets) {
    if (f.cls != FacetClass::MacroInterior) continue;
    const double jq = q.values[f.elems[0]] - q.values[f.elems[1]];
    const double jt = t.values[f.elems[0]] - t.values[f.elems[1]];
    // ([q],[t])_F = h_F [q][t] for element-wise constants.
    acc += tau_facet(f.length, params) * f.length * jq * jt;
  }
  return acc;
}

Eigen::SparseMatrix<double> assemble_stab_matrix(const FineMesh& mesh,
                                                 const PowerLawParams& params) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.n_facets());
  for (const Facet& f : mesh.facets) {
    if (f.cls != FacetClass::MacroInterior) continue;
    const double w = tau_facet(f.length, params) * f.length;
    const int kp = f.elems[0];
    const int km = f.elems[1];
    trip.emplace_back(kp, kp, w);
    trip.emplace_back(km, km, w);
    trip.emplace_back(kp, km, -w);
    trip.emplace_back(km, kp, -w);
  }
  Eigen::SparseMatrix<double> S(mesh.n_elements(), mesh.n_elements());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

// --------------------------------------------------------------------------
// RT0 basis and lifting
// --------------------------------------------------------------------------

RT0Basis RT0Basis::build(const FineMesh& mesh) {
  RT0Basis rt;
  rt.facet.resize(mesh.n_facets());
  for (int i = 0; i < mesh.n_facets(); ++i) {
    const Facet& f = mesh.facets[i];
    for (int side = 0; side < 2; ++side) {
      const int k = f.elems[side];
      if (k == -1) continue;
      const auto& e = mesh.elements[k];
      int opp = -1;
      for (int j = 0; j < 3; ++j)
        if (e[j] != f.nodes[0] && e[j] != f.nodes[1]) opp = e[j];
      const double sign = (side == 0) ? 1.0 : -1.0;  // normal exits elems[0]
      rt.facet[i][side] = {k, opp, sign * f.length / (2.0 * mesh.area[k])};
    }
  }
  return rt;
}

Eigen::Vector2d RT0Basis::eval(const FineMesh& mesh, int facet_id, int k,
                               const Eigen::Vector2d& x) const {
  for (const Side& s : facet[facet_id])
    if (s.elem == k)
      return s.signed_coeff * (x - mesh.nodes[s.opp_node]);
  return Eigen::Vector2d::Zero();  // outside the support
}

LiftedField lift(const FineMesh& mesh, const P1VectorField& v,
                 const P0Field& q, const PowerLawParams& params) {
  check_fine_p0(mesh, q, "lift");
  LiftedField L;
  L.p1 = v;
  L.rt_coeffs.assign(mesh.n_facets(), 0.0);
  for (int i = 0; i < mesh.n_facets(); ++i) {
    const Facet& f = mesh.facets[i];
    if (f.cls != FacetClass::MacroInterior) continue;
    const double jump = q.values[f.elems[0]] - q.values[f.elems[1]];
    L.rt_coeffs[i] = tau_facet(f.length, params) * jump;
  }
  return L;
}

Eigen::Vector2d eval_lifted(const FineMesh& mesh, const RT0Basis& rt,
                            const LiftedField& L, int k,
                            const Eigen::Vector2d& x) {
  Eigen::Vector2d val = eval_p1(mesh, k, L.p1, x);
  for (int j = 0; j < 3; ++j) {
    const int fi = mesh.element_facets[k][j];
    const double c = L.rt_coeffs[fi];
    if (c != 0.0) val += c * rt.eval(mesh, fi, k, x);
  }
  return val;
}

P0Field lifted_divergence(const FineMesh& mesh, const RT0Basis& rt,
                          const LiftedField& L) {
  P0Field div = P0Field::zero_fine(mesh);
  for (int k = 0; k < mesh.n_elements(); ++k)
    div.values[k] = p1_gradient(mesh, k, L.p1).trace();
  for (int i = 0; i < mesh.n_facets(); ++i) {
    const double c = L.rt_coeffs[i];
    if (c == 0.0) continue;
    for (const RT0Basis::Side& s : rt.facet[i]) {
      if (s.elem == -1) continue;
      // div phi_F = d * signed_coeff = sign |F| / |K|.
      div.values[s.elem] += c * 2.0 * s.signed_coeff;
    }
  }
  return div;
}

double lp_norm_lifted(const FineMesh& mesh, const RT0Basis& rt,
                      const LiftedField& L, double s, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  double acc = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    double local = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Eigen::Vector2d x = l[0] * mesh.nodes[e[0]] +
                                l[1] * mesh.nodes[e[1]] +
                                l[2] * mesh.nodes[e[2]];
      local += rule.weights[q] *
               std::pow(eval_lifted(mesh, rt, L, k, x).norm(), s);
    }
    acc += mesh.area[k] * local;
  }
  return std::pow(acc, 1.0 / s);
}

LiftStabilityReport lift_stability_report(const FineMesh& mesh,
                                          const RT0Basis& rt,
                                          const P1VectorField& v,
                                          const P0Field& q,
                                          const PowerLawParams& params) {
  const LiftedField L = lift(mesh, v, q, params);
  LiftStabilityReport rep;
  rep.lift_norm = lp_norm_lifted(mesh, rt, L, 2.0 * params.r_tilde);
  rep.v_seminorm = w1r_seminorm(mesh, v, params.r);
  rep.stab_energy = std::sqrt(stab_form(mesh, q, q, params));
  return rep;
}

}  // namespace plfem
