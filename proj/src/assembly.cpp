#include "plfem/assembly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plfem {

VelocityDofMap VelocityDofMap::build(const FineMesh& mesh) {
  VelocityDofMap map;
  map.slot_of_node.assign(mesh.nodes.size(), -1);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (!mesh.boundary_node[i]) {
      map.slot_of_node[i] = static_cast<int>(map.node_of_slot.size());
      map.node_of_slot.push_back(i);
    }
  }
  return map;
}

double regularised_viscosity(double grad_norm_sq,
                             const PowerLawParams& params) {
  if (params.r == 2.0) return 1.0;
  const double t2 = grad_norm_sq + params.epsilon_reg * params.epsilon_reg;
  if (t2 == 0.0 && params.r > 2.0) return 0.0;
  const double nu = std::pow(t2, 0.5 * (params.r - 2.0));
  if (!std::isfinite(nu))
    throw std::runtime_error(
        "viscosity not finite at a degenerate gradient: r < 2 requires a "
        "positive epsilon_reg");
  return nu;
}

ViscousBlock assemble_viscous(const FineMesh& mesh, const VelocityDofMap& dofs,
                              const P1VectorField& u_k,
                              const PowerLawParams& params) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(18 * mesh.n_elements());
  ViscousBlock out;
  out.nu_min = std::numeric_limits<double>::infinity();
  out.nu_max = 0.0;

  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double g2 = p1_gradient(mesh, k, u_k).squaredNorm();
    const double nu = regularised_viscosity(g2, params);
    out.nu_min = std::min(out.nu_min, nu);
    out.nu_max = std::max(out.nu_max, nu);
    const auto& e = mesh.elements[k];
    for (int a = 0; a < 3; ++a) {
      if (dofs.slot_of_node[e[a]] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        if (dofs.slot_of_node[e[b]] < 0) continue;
        const double w =
            nu * mesh.area[k] * mesh.grad_hat[k][a].dot(mesh.grad_hat[k][b]);
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(dofs.dof(e[a], c), dofs.dof(e[b], c), w);
      }
    }
  }
  out.A.resize(dofs.n_dofs(), dofs.n_dofs());
  out.A.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::SparseMatrix<double> assemble_convection(const FineMesh& mesh,
                                                const VelocityDofMap& dofs,
                                                const RT0Basis& rt,
                                                const LiftedField& beta) {
  // -(beta x u, grad v) = -int u . (beta . grad) v couples equal components
  // only.  beta is linear per element, hats are linear, grad v constant:
  // the integrand has degree two.
  const QuadratureRule rule = QuadratureRule::triangle(2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(18 * mesh.n_elements());

  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    double local[3][3] = {};  // int hat_b (beta . grad hat_a)
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Eigen::Vector2d x = l[0] * mesh.nodes[e[0]] +
                                l[1] * mesh.nodes[e[1]] +
                                l[2] * mesh.nodes[e[2]];
      const Eigen::Vector2d b_val = eval_lifted(mesh, rt, beta, k, x);
      for (int a = 0; a < 3; ++a) {
        const double adv = b_val.dot(mesh.grad_hat[k][a]);
        for (int b = 0; b < 3; ++b)
          local[a][b] += rule.weights[q] * adv * l[b];
      }
    }
    for (int a = 0; a < 3; ++a) {
      if (dofs.slot_of_node[e[a]] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        if (dofs.slot_of_node[e[b]] < 0) continue;
        const double w = -mesh.area[k] * local[a][b];
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(dofs.dof(e[a], c), dofs.dof(e[b], c), w);
      }
    }
  }
  Eigen::SparseMatrix<double> N(dofs.n_dofs(), dofs.n_dofs());
  N.setFromTriplets(trip.begin(), trip.end());
  return N;
}

Eigen::SparseMatrix<double> assemble_divergence(const FineMesh& mesh,
                                                const VelocityDofMap& dofs) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(6 * mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    for (int b = 0; b < 3; ++b) {
      if (dofs.slot_of_node[e[b]] < 0) continue;
      for (int c = 0; c < 2; ++c)
        trip.emplace_back(k, dofs.dof(e[b], c),
                          mesh.area[k] * mesh.grad_hat[k][b][c]);
    }
  }
  Eigen::SparseMatrix<double> B(mesh.n_elements(), dofs.n_dofs());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

Eigen::VectorXd assemble_rhs(const FineMesh& mesh, const VelocityDofMap& dofs,
                             const VectorFn& f, int quad_degree) {
  const QuadratureRule rule = QuadratureRule::triangle(quad_degree);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_dofs());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.elements[k];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Eigen::Vector2d x = l[0] * mesh.nodes[e[0]] +
                                l[1] * mesh.nodes[e[1]] +
                                l[2] * mesh.nodes[e[2]];
      const Eigen::Vector2d fx = f(x);
      for (int a = 0; a < 3; ++a) {
        if (dofs.slot_of_node[e[a]] < 0) continue;
        const double w = mesh.area[k] * rule.weights[q] * l[a];
        for (int c = 0; c < 2; ++c) rhs[dofs.dof(e[a], c)] += w * fx[c];
      }
    }
  }
  return rhs;
}

Eigen::VectorXd velocity_coeffs(const FineMesh&, const VelocityDofMap& dofs,
                                const P1VectorField& u) {
  Eigen::VectorXd x(dofs.n_dofs());
  for (size_t s = 0; s < dofs.node_of_slot.size(); ++s) {
    const int n = dofs.node_of_slot[s];
    x[2 * s] = u.values[n][0];
    x[2 * s + 1] = u.values[n][1];
  }
  return x;
}

P1VectorField velocity_from_coeffs(const FineMesh& mesh,
                                   const VelocityDofMap& dofs,
                                   const Eigen::VectorXd& coeffs) {
  P1VectorField u = P1VectorField::zero(mesh);
  for (size_t s = 0; s < dofs.node_of_slot.size(); ++s)
    u.values[dofs.node_of_slot[s]] =
        Eigen::Vector2d(coeffs[2 * s], coeffs[2 * s + 1]);
  return u;
}

NonlinearResidual nonlinear_residual(const FineMesh& mesh, const RT0Basis& rt,
                                     const PowerLawParams& params,
                                     const StabilisedSystem& sys,
                                     const P1VectorField& u, const P0Field& p) {
  const ViscousBlock visc = assemble_viscous(mesh, sys.dofs, u, params);
  const LiftedField beta = lift(mesh, u, p, params);
  const Eigen::SparseMatrix<double> N =
      assemble_convection(mesh, sys.dofs, rt, beta);

  const Eigen::VectorXd uc = velocity_coeffs(mesh, sys.dofs, u);
  const Eigen::VectorXd pc =
      Eigen::Map<const Eigen::VectorXd>(p.values.data(), p.values.size());

  NonlinearResidual res;
  res.momentum = visc.A * uc + N * uc - sys.B.transpose() * pc - sys.rhs;
  res.mass = sys.B * uc + sys.S * pc;
  const double scale = std::max(sys.rhs.lpNorm<Eigen::Infinity>(),
                                std::numeric_limits<double>::min());
  res.scaled_max = std::max(res.momentum.lpNorm<Eigen::Infinity>(),
                            res.mass.lpNorm<Eigen::Infinity>()) /
                   scale;
  return res;
}

}  // namespace plfem
