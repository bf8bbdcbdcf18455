#include "plfem/cli_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace plfem {

SolverConfig RunConfig::solver() const {
  SolverConfig sc;
  sc.tolerance = tol;
  sc.max_iterations = max_iters;
  sc.theta = theta;
  sc.linear_tolerance = linear_tol;
  return sc;
}

PowerLawParams RunConfig::params() const {
  return PowerLawParams::make(r, 2, eps);
}

// --------------------------------------------------------------------------
// Config files
// --------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void config_error(const std::string& path, int lineno,
                               const std::string& what) {
  throw std::invalid_argument("config '" + path + "' line " +
                              std::to_string(lineno) + ": " + what);
}

double parse_double(const std::string& path, int lineno,
                    const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    config_error(path, lineno, "expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& path, int lineno, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    config_error(path, lineno, "expected an integer, got '" + value + "'");
  }
}

}  // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      config_error(path, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) config_error(path, lineno, "empty value");

    if (key == "r") config.r = parse_double(path, lineno, value);
    else if (key == "n") config.n = parse_int(path, lineno, value);
    else if (key == "levels") config.levels = parse_int(path, lineno, value);
    else if (key == "case") config.case_name = value;
    else if (key == "tol") config.tol = parse_double(path, lineno, value);
    else if (key == "max-iters") config.max_iters = parse_int(path, lineno, value);
    else if (key == "theta") config.theta = parse_double(path, lineno, value);
    else if (key == "eps") config.eps = parse_double(path, lineno, value);
    else if (key == "linear-tol") config.linear_tol = parse_double(path, lineno, value);
    else if (key == "out") config.out_dir = value;
    else if (key == "mesh") config.mesh_file = value;
    else
      config_error(path, lineno,
                   "unknown key '" + key +
                       "' (known: r, n, levels, case, tol, max-iters, theta, "
                       "eps, linear-tol, out, mesh)");
  }
}

// --------------------------------------------------------------------------
// VTK output
// --------------------------------------------------------------------------

void write_vtk(const std::string& path, const FineMesh& mesh,
               const SolutionState& state, const P0Field& div_lift) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  char buf[160];
  out << "# vtk DataFile Version 2.0\n"
      << "stabilised power-law flow solution\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", p.x(), p.y());
    out << buf;
  }
  out << "CELLS " << mesh.n_elements() << " " << 4 * mesh.n_elements() << "\n";
  for (const auto& e : mesh.elements)
    out << "3 " << e[0] << " " << e[1] << " " << e[2] << "\n";
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int k = 0; k < mesh.n_elements(); ++k) out << "5\n";
  out << "POINT_DATA " << mesh.n_nodes() << "\n"
      << "VECTORS velocity double\n";
  for (const auto& v : state.u.values) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x(), v.y());
    out << buf;
  }
  out << "CELL_DATA " << mesh.n_elements() << "\n"
      << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : state.p.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", p);
    out << buf;
  }
  out << "SCALARS div_lifted double 1\nLOOKUP_TABLE default\n";
  for (double v : div_lift.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
}

// --------------------------------------------------------------------------
// Commands
// --------------------------------------------------------------------------

namespace {

FineMesh make_mesh(const RunConfig& cfg) {
  if (cfg.mesh_file) return red_refine(read_mesh(*cfg.mesh_file));
  return level_mesh(cfg.n, 0);
}

int cmd_solve(const RunConfig& cfg) {
  const PowerLawParams params = cfg.params();
  const ManufacturedCase mc = find_case(cfg.case_name);
  const FineMesh mesh = make_mesh(cfg);
  const RT0Basis rt = RT0Basis::build(mesh);
  const SolutionState state =
      picard_solve(mesh, rt, params, forcing_function(mc, params), cfg.solver());

  std::filesystem::create_directories(cfg.out_dir);
  write_iteration_log(cfg.out_dir + "/iterations.csv", params, state.history);
  const P0Field div =
      lifted_divergence(mesh, rt, lift(mesh, state.u, state.p, params));
  write_vtk(cfg.out_dir + "/solution.vtk", mesh, state, div);

  std::cout << "case " << mc.name << ", r = " << params.r << ", "
            << mesh.n_elements() << " elements\n"
            << state.message << "\n";
  if (state.converged) {
    const AprioriReport rep = apriori_quantities(mesh, rt, params, state);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "|u|^r_1r = %.6e  ||L||_2rt = %.6e  s(p,p) = %.6e  "
                  "||p||_rt = %.6e\n",
                  rep.u_energy, rep.lift_norm, rep.stab_energy, rep.p_norm);
    std::cout << buf;
  }
  std::cout << "wrote " << cfg.out_dir << "/solution.vtk and "
            << cfg.out_dir << "/iterations.csv\n";
  return state.converged ? 0 : 1;
}

int cmd_convergence(const RunConfig& cfg) {
  const PowerLawParams params = cfg.params();
  const ManufacturedCase mc = find_case(cfg.case_name);
  const ConvergenceTable table = run_convergence_study(
      mc, params, cfg.n, cfg.levels, cfg.solver());

  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/convergence.csv";
  write_convergence_csv(path, table);

  std::printf("%-6s %-12s %-13s %-13s %-13s %-13s %-13s\n", "level", "h",
              "err_u_w1r", "err_u_l2rt", "err_p_lrt", "s_php", "max_div_L");
  for (const ConvergenceRow& r : table.rows)
    std::printf("%-6d %-12.5e %-13.6e %-13.6e %-13.6e %-13.6e %-13.6e\n",
                r.level, r.h, r.err_u_w1r, r.err_u_l2rt, r.err_p_lrt, r.s_php,
                r.max_div_lift);
  std::printf("orders (last row): u_w1r %.3f, u_l2rt %.3f, p_lrt %.3f\n",
              table.rows.back().order_u_w1r, table.rows.back().order_u_l2rt,
              table.rows.back().order_p_lrt);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<CheckResult> results =
      run_invariant_suite(cfg.n, cfg.levels);
  bool all = true;
  for (const CheckResult& c : results) {
    std::printf("%-4s %-28s measured %.3e  threshold %.3e  (%s)\n",
                c.pass ? "PASS" : "FAIL", c.id.c_str(), c.measured,
                c.threshold, c.description.c_str());
    all = all && c.pass;
  }
  std::printf("%zu checks, %s\n", results.size(),
              all ? "all passed" : "FAILURES present");
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"stabilised P1/P0 finite elements for power-law fluids"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  std::string mesh_path;
  double eps_value = 0.0;

  auto* opt_config =
      app.add_option("--config", config_path, "flat key = value config file");
  auto* opt_r = app.add_option("--r", flags.r, "power-law exponent (> 1)");
  auto* opt_n = app.add_option("--n", flags.n, "macro cells per side");
  auto* opt_levels =
      app.add_option("--levels", flags.levels, "levels of a convergence study");
  auto* opt_case =
      app.add_option("--case", flags.case_name, "manufactured case (M1, M0)");
  auto* opt_tol = app.add_option("--tol", flags.tol, "nonlinear tolerance");
  auto* opt_max =
      app.add_option("--max-iters", flags.max_iters, "iteration budget");
  auto* opt_theta = app.add_option("--theta", flags.theta,
                                   "damping factor (0 = pick by exponent)");
  auto* opt_eps =
      app.add_option("--eps", eps_value, "viscosity regularisation epsilon");
  auto* opt_ltol =
      app.add_option("--linear-tol", flags.linear_tol, "linear solve tolerance");
  auto* opt_out = app.add_option("--out", flags.out_dir, "output directory");
  auto* opt_mesh =
      app.add_option("--mesh", mesh_path, "macro mesh file (ASCII)");

  auto* sub_solve = app.add_subcommand("solve", "single solve, VTK output");
  auto* sub_conv =
      app.add_subcommand("convergence", "nested-mesh convergence study");
  auto* sub_verify =
      app.add_subcommand("verify", "run the numerical invariant battery");
  for (auto* sub : {sub_solve, sub_conv, sub_verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    // File first, then every flag the command line actually set.
    RunConfig cfg;
    if (*opt_config) apply_config_file(cfg, config_path);
    if (*opt_r) cfg.r = flags.r;
    if (*opt_n) cfg.n = flags.n;
    if (*opt_levels) cfg.levels = flags.levels;
    if (*opt_case) cfg.case_name = flags.case_name;
    if (*opt_tol) cfg.tol = flags.tol;
    if (*opt_max) cfg.max_iters = flags.max_iters;
    if (*opt_theta) cfg.theta = flags.theta;
    if (*opt_eps) cfg.eps = eps_value;
    if (*opt_ltol) cfg.linear_tol = flags.linear_tol;
    if (*opt_out) cfg.out_dir = flags.out_dir;
    if (*opt_mesh) cfg.mesh_file = mesh_path;

    if (app.got_subcommand(sub_solve)) return cmd_solve(cfg);
    if (app.got_subcommand(sub_conv)) return cmd_convergence(cfg);
    return cmd_verify(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace plfem
