#include "plfem/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace plfem {

namespace {

void check_dimension(int d) {
  if (d != 2 && d != 3)
    throw std::invalid_argument("spatial dimension must be 2 or 3, got " +
                                std::to_string(d));
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double admissibility_bound(int d) {
  check_dimension(d);
  return 2.0 * d / (d + 2.0);
}

double conjugate_exponent(double r) { return r / (r - 1.0); }

SobolevExponent sobolev_exponent(double r, int d) {
  check_dimension(d);
  if (r >= d) return SobolevExponent::inf();
  return SobolevExponent::finite(d * r / (d - r));
}

double critical_exponent(double r, int d) {
  check_dimension(d);
  const double rc = conjugate_exponent(r);
  const SobolevExponent rs = sobolev_exponent(r, d);
  if (rs.infinite) return rc;
  return std::min(rc, 0.5 * rs.value);
}

double alpha_exponent(double r, int d) {
  check_dimension(d);
  if (r <= admissibility_bound(d))
    throw std::invalid_argument("alpha_exponent: r must exceed 2d/(d+2)");
  if (r >= 2.0) return 1.0;
  const double middle_edge = 3.0 * d / (d + 2.0);
  if (r >= middle_edge) return 1.0 - d + 2.0 * d / critical_exponent(r, d);
  return (d - 1.0) / 3.0;
}

PowerLawParams PowerLawParams::make(double r, int d,
                                    std::optional<double> epsilon) {
  check_dimension(d);
  const double bound = admissibility_bound(d);
  if (!(r > bound)) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "power-law exponent r = %.17g inadmissible: require r > "
                  "2d/(d+2) = %.17g for d = %d",
                  r, bound, d);
    throw std::invalid_argument(msg);
  }
  PowerLawParams p;
  p.d = d;
  p.r = r;
  p.r_conj = conjugate_exponent(r);
  p.r_star = sobolev_exponent(r, d);
  p.r_tilde = critical_exponent(r, d);
  p.alpha = alpha_exponent(r, d);
  if (epsilon) {
    if (*epsilon < 0.0)
      throw std::invalid_argument("epsilon_reg must be non-negative");
    p.epsilon_reg = *epsilon;
  } else {
    p.epsilon_reg = (r < 2.0) ? 1e-8 : 0.0;
  }
  return p;
}

std::vector<std::string> PowerLawParams::report_header() const {
  std::vector<std::string> lines;
  lines.push_back("# d = " + std::to_string(d));
  lines.push_back("# r = " + fmt17(r));
  lines.push_back("# r_conj = " + fmt17(r_conj));
  lines.push_back(std::string("# r_star = ") +
                  (r_star.infinite ? "inf" : fmt17(r_star.value)));
  lines.push_back("# r_tilde = " + fmt17(r_tilde));
  lines.push_back("# alpha = " + fmt17(alpha));
  lines.push_back("# epsilon_reg = " + fmt17(epsilon_reg));
  return lines;
}

}  // namespace plfem
