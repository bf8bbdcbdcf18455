#include "plfem/manufactured.hpp"

#include <cmath>
#include <stdexcept>

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

namespace plfem {

namespace {

// One-dimensional bubble X(t) = t^2 (1-t)^2 and derivatives.
double bub(double t) { return t * t * (1.0 - t) * (1.0 - t); }
double bub1(double t) { return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }
double bub2(double t) { return 2.0 - 12.0 * t + 12.0 * t * t; }
double bub3(double t) { return -12.0 + 24.0 * t; }

}  // namespace

ManufacturedCase case_M1() {
  ManufacturedCase mc;
  mc.name = "M1";
  // Stream function psi = X(x) Y(y); u = (d psi/dy, -d psi/dx).
  mc.velocity = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(bub(x[0]) * bub1(x[1]), -bub1(x[0]) * bub(x[1]));
  };
  mc.velocity_gradient = [](const Eigen::Vector2d& x) {
    Eigen::Matrix2d G;  // G(i,j) = d u_i / d x_j
    G(0, 0) = bub1(x[0]) * bub1(x[1]);
    G(0, 1) = bub(x[0]) * bub2(x[1]);
    G(1, 0) = -bub2(x[0]) * bub(x[1]);
    G(1, 1) = -bub1(x[0]) * bub1(x[1]);
    return G;
  };
  mc.velocity_laplacian = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(
        bub2(x[0]) * bub1(x[1]) + bub(x[0]) * bub3(x[1]),
        -bub3(x[0]) * bub(x[1]) - bub1(x[0]) * bub2(x[1]));
  };
  mc.pressure = [](const Eigen::Vector2d& x) {
    return std::sin(2.0 * M_PI * x[0]) * std::sin(2.0 * M_PI * x[1]);
  };
  mc.pressure_gradient = [](const Eigen::Vector2d& x) {
    const double c = 2.0 * M_PI;
    return Eigen::Vector2d(c * std::cos(c * x[0]) * std::sin(c * x[1]),
                           c * std::sin(c * x[0]) * std::cos(c * x[1]));
  };
  return mc;
}

ManufacturedCase case_M0() {
  ManufacturedCase mc = case_M1();
  mc.name = "M0";
  mc.velocity = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); };
  mc.velocity_gradient = [](const Eigen::Vector2d&) {
    return Eigen::Matrix2d::Zero();
  };
  mc.velocity_laplacian = [](const Eigen::Vector2d&) {
    return Eigen::Vector2d::Zero();
  };
  return mc;
}

ManufacturedCase find_case(const std::string& name) {
  if (name == "M1") return case_M1();
  if (name == "M0") return case_M0();
  throw std::invalid_argument("unknown manufactured case '" + name +
                              "'; available: M1, M0");
}

Eigen::Matrix2d powerlaw_flux(const Eigen::Matrix2d& G,
                              const PowerLawParams& params) {
  if (params.r == 2.0) return G;
  const double t2 = G.squaredNorm() + params.epsilon_reg * params.epsilon_reg;
  if (t2 == 0.0) return Eigen::Matrix2d::Zero();  // |G|^{r-1} -> 0 for r > 1
  return std::pow(t2, 0.5 * (params.r - 2.0)) * G;
}

Eigen::Vector2d forcing_oracle(const ManufacturedCase& mc,
                               const Eigen::Vector2d& x,
                               const PowerLawParams& params, double delta) {
  // div of the flux S: (div S)_i = d_j S_ij, central differences in each
  // coordinate direction with one Richardson step: D = (4 D_{h/2} - D_h)/3.
  auto flux = [&](const Eigen::Vector2d& y) {
    return powerlaw_flux(mc.velocity_gradient(y), params);
  };
  Eigen::Vector2d div_flux = Eigen::Vector2d::Zero();
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[j] = 1.0;
    const Eigen::Matrix2d d_full =
        (flux(x + delta * e) - flux(x - delta * e)) / (2.0 * delta);
    const Eigen::Matrix2d d_half =
        (flux(x + 0.5 * delta * e) - flux(x - 0.5 * delta * e)) / delta;
    const Eigen::Matrix2d dj = (4.0 * d_half - d_full) / 3.0;
    div_flux += dj.col(j);
  }

  // (u . grad) u; div(u x u) reduces to it for solenoidal u.
  const Eigen::Vector2d u = mc.velocity(x);
  const Eigen::Vector2d convect = mc.velocity_gradient(x) * u;

  return -div_flux + convect + mc.pressure_gradient(x);
}

VectorFn forcing_function(const ManufacturedCase& mc,
                          const PowerLawParams& params, double delta) {
  return [mc, params, delta](const Eigen::Vector2d& x) {
    return forcing_oracle(mc, x, params, delta);
  };
}

}  // namespace plfem
