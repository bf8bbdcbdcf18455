#include "plfem/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace plfem {

namespace {

struct Rule1D {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;  // weights, sum = mu0
};

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix built from the
// three-term recurrence, weights are mu0 times the squared first components
// of the normalised eigenvectors.
Rule1D golub_welsch(const std::vector<double>& a, const std::vector<double>& b,
                    double mu0) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = a[k];
    if (k + 1 < n) {
      const double off = std::sqrt(b[k + 1]);
      J(k, k + 1) = off;
      J(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("quadrature: Jacobi matrix eigensolve failed");
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.x[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.w[k] = mu0 * v0 * v0;
  }
  return rule;
}

// Legendre on [-1,1]: a_k = 0, b_k = k^2/(4k^2-1), mu0 = 2.
Rule1D gauss_legendre(int n) {
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (int k = 1; k < n; ++k) b[k] = k * k / (4.0 * k * k - 1.0);
  return golub_welsch(a, b, 2.0);
}

// Jacobi with weight (1-x) on [-1,1]:
//   a_k = -1/((2k+1)(2k+3)),  b_k = k(k+1)/(2k+1)^2,  mu0 = 2.
Rule1D gauss_jacobi_10(int n) {
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (int k = 0; k < n; ++k) a[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + 1.0;
    b[k] = k * (k + 1.0) / (t * t);
  }
  return golub_welsch(a, b, 2.0);
}

int points_for_degree(int degree) {
  if (degree < 0) throw std::invalid_argument("quadrature degree < 0");
  return degree / 2 + 1;  // 2n-1 >= degree
}

}  // namespace

QuadratureRule QuadratureRule::triangle(int degree) {
  const int n = points_for_degree(degree);
  const Rule1D leg = gauss_legendre(n);
  const Rule1D jac = gauss_jacobi_10(n);

  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);

  // Map both rules to [0,1]; the Jacobi direction absorbs the (1-xi)
  // area factor of the collapsed coordinates x = xi, y = (1-xi) eta.
  for (int i = 0; i < n; ++i) {
    const double xi = 0.5 * (jac.x[i] + 1.0);
    const double wi = 0.25 * jac.w[i];  // carries (1-xi) weight, sums to 1/2
    for (int j = 0; j < n; ++j) {
      const double eta = 0.5 * (leg.x[j] + 1.0);
      const double wj = 0.5 * leg.w[j];
      const double x = xi;
      const double y = (1.0 - xi) * eta;
      // Normalise so the weights sum to 1 (reference area is 1/2).
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * wi * wj);
    }
  }
  return rule;
}

FacetRule FacetRule::gauss(int degree) {
  const int n = points_for_degree(degree);
  const Rule1D leg = gauss_legendre(n);
  FacetRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (leg.x[i] + 1.0);
    rule.weights[i] = 0.5 * leg.w[i];
  }
  return rule;
}

}  // namespace plfem
