// ============================================================================
// cli_io.hpp
//
// Run configuration (flat key = value files plus command-line flags, flags
// winning), legacy-VTK output of solved states, and the command dispatcher
// behind the powerlaw-fem executable:
//
//   powerlaw-fem solve        one solve; writes solution.vtk + iterations.csv
//   powerlaw-fem convergence  nested-mesh study; writes convergence.csv
//   powerlaw-fem verify       numerical invariant battery
//
// Exit codes: 0 success, 1 a check or the nonlinear iteration failed,
// 2 usage or configuration error.
// ============================================================================

#pragma once

#include "plfem/solver.hpp"
#include "plfem/verify.hpp"

#include <optional>
#include <string>

namespace plfem {

struct RunConfig {
  double r = 2.0;
  int n = 2;           // macro cells per side of the unit square
  int levels = 3;      // refinement levels of a convergence study
  std::string case_name = "M1";
  double tol = 1e-10;
  int max_iters = 200;
  double theta = 0.0;  // 0 = pick by exponent
  std::optional<double> eps;  // viscosity regularisation override
  double linear_tol = 1e-10;
  std::string out_dir = ".";
  std::optional<std::string> mesh_file;  // macro mesh instead of structured

  SolverConfig solver() const;
  PowerLawParams params() const;  // validates r
};

// Parses "key = value" lines into the config; '#' starts a comment.  Unknown
// keys and malformed values are errors naming the offending line.
void apply_config_file(RunConfig& config, const std::string& path);

// Legacy VTK (2.0, ASCII): triangles, point-data velocity, cell-data
// pressure and div of the lifted velocity.
void write_vtk(const std::string& path, const FineMesh& mesh,
               const SolutionState& state, const P0Field& div_lift);

// Full command-line entry point (parsing, dispatch, error reporting).
int run_cli(int argc, const char* const* argv);

}  // namespace plfem
