// Run configuration, VTK output and the command dispatcher: config-file
// parsing with precise line-numbered errors, flag precedence over file
// values, the exact legacy-VTK layout with a manual reader round trip, and
// the exit codes of the three commands.

#include <doctest.h>

#include "plfem/cli_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace plfem;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const fs::path& dir, const std::string& name,
                    const std::string& body) {
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

int cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"powerlaw-fem"};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config file: defaults, full override, comments") {
  const fs::path dir = fresh_dir("plfem_test_config");

  RunConfig cfg;
  apply_config_file(cfg, write_text(dir, "empty.cfg", "# nothing here\n\n").string());
  CHECK(cfg.r == 2.0);
  CHECK(cfg.n == 2);
  CHECK(cfg.levels == 3);
  CHECK(cfg.case_name == "M1");
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.max_iters == 200);
  CHECK(cfg.theta == 0.0);
  CHECK(!cfg.eps.has_value());
  CHECK(cfg.linear_tol == 1e-10);
  CHECK(cfg.out_dir == ".");
  CHECK(!cfg.mesh_file.has_value());

  apply_config_file(cfg, write_text(dir, "full.cfg",
                                    "r = 1.5   # shear thinning\n"
                                    "n = 4\n"
                                    "levels = 2\n"
                                    "case = M0\n"
                                    "tol = 1e-8\n"
                                    "max-iters = 50\n"
                                    "theta = 0.5\n"
                                    "eps = 1e-6\n"
                                    "linear-tol = 1e-9\n"
                                    "out = results\n")
                            .string());
  CHECK(cfg.r == 1.5);
  CHECK(cfg.n == 4);
  CHECK(cfg.levels == 2);
  CHECK(cfg.case_name == "M0");
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.max_iters == 50);
  CHECK(cfg.theta == 0.5);
  REQUIRE(cfg.eps.has_value());
  CHECK(*cfg.eps == 1e-6);
  CHECK(cfg.linear_tol == 1e-9);
  CHECK(cfg.out_dir == "results");
}

TEST_CASE("config file: errors name the line and the offence") {
  const fs::path dir = fresh_dir("plfem_test_config_err");
  RunConfig cfg;

  const auto unknown =
      write_text(dir, "unknown.cfg", "r = 2\nn = 2\nfrobnicate = 7\n");
  try {
    apply_config_file(cfg, unknown.string());
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("unknown key 'frobnicate'") != std::string::npos);
    CHECK(msg.find("known: r, n, levels") != std::string::npos);
  }

  try {
    apply_config_file(cfg, write_text(dir, "bad.cfg", "r = banana\n").string());
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  CHECK_THROWS_AS(
      apply_config_file(cfg, write_text(dir, "noval.cfg", "r =\n").string()),
      std::invalid_argument);
  CHECK_THROWS_AS(apply_config_file(cfg, (dir / "missing.cfg").string()),
                  std::invalid_argument);
}

TEST_CASE("run configuration validates the exponent and maps solver knobs") {
  RunConfig cfg;
  cfg.r = 1.0;
  try {
    cfg.params();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("2d/(d+2) = 1") != std::string::npos);
  }

  cfg.r = 1.5;
  CHECK(cfg.params().epsilon_reg == 1e-8);
  cfg.eps = 1e-3;
  CHECK(cfg.params().epsilon_reg == 1e-3);
  cfg.r = 2.0;
  cfg.eps.reset();
  CHECK(cfg.params().epsilon_reg == 0.0);

  cfg.tol = 1e-7;
  cfg.max_iters = 13;
  cfg.theta = 0.4;
  cfg.linear_tol = 1e-8;
  const SolverConfig sc = cfg.solver();
  CHECK(sc.tolerance == 1e-7);
  CHECK(sc.max_iterations == 13);
  CHECK(sc.theta == 0.4);
  CHECK(sc.linear_tolerance == 1e-8);
}

TEST_CASE("VTK output: exact layout, zero data, byte determinism, round trip") {
  const fs::path dir = fresh_dir("plfem_test_vtk");
  const FineMesh mesh = level_mesh(1, 0);
  SolutionState st;
  st.u = P1VectorField::zero(mesh);
  st.p = P0Field::zero_fine(mesh);
  P0Field div = P0Field::zero_fine(mesh);

  // One distinctive value to prove the 17-digit round trip.
  int inner = 0;
  while (mesh.boundary_node[inner]) ++inner;
  st.u.values[inner] = Eigen::Vector2d(M_PI, -std::exp(1.0) / 3.0);

  const fs::path path = dir / "state.vtk";
  write_vtk(path.string(), mesh, st, div);
  const std::string bytes = slurp(path);
  write_vtk(path.string(), mesh, st, div);
  CHECK(slurp(path) == bytes);

  const std::vector<std::string> lines = lines_of(bytes);
  REQUIRE(lines.size() == 4 + 1 + 9 + 1 + 8 + 1 + 8 + 2 + 9 + 3 + 8 + 2 + 8);
  CHECK(lines[0] == "# vtk DataFile Version 2.0");
  CHECK(lines[2] == "ASCII");
  CHECK(lines[3] == "DATASET UNSTRUCTURED_GRID");
  CHECK(lines[4] == "POINTS 9 double");
  CHECK(lines[14] == "CELLS 8 32");
  CHECK(lines[23] == "CELL_TYPES 8");
  for (int k = 0; k < 8; ++k) CHECK(lines[24 + k] == "5");
  CHECK(lines[32] == "POINT_DATA 9");
  CHECK(lines[33] == "VECTORS velocity double");
  CHECK(lines[43] == "CELL_DATA 8");
  CHECK(lines[44] == "SCALARS pressure double 1");
  CHECK(lines[45] == "LOOKUP_TABLE default");
  CHECK(lines[54] == "SCALARS div_lifted double 1");
  CHECK(lines[55] == "LOOKUP_TABLE default");

  // Manual reader: coordinates and data parse back to the exact doubles.
  for (int i = 0; i < 9; ++i) {
    std::istringstream in(lines[5 + i]);
    double x, y, z;
    REQUIRE(static_cast<bool>(in >> x >> y >> z));
    CHECK(x == mesh.nodes[i].x());
    CHECK(y == mesh.nodes[i].y());
    CHECK(z == 0.0);
  }
  for (int i = 0; i < 9; ++i) {
    std::istringstream in(lines[34 + i]);
    double vx, vy, vz;
    REQUIRE(static_cast<bool>(in >> vx >> vy >> vz));
    CHECK(vx == st.u.values[i].x());
    CHECK(vy == st.u.values[i].y());
    CHECK(vz == 0.0);
  }
  for (int k = 0; k < 8; ++k) {
    CHECK(std::stod(lines[46 + k]) == 0.0);
    CHECK(std::stod(lines[56 + k]) == 0.0);
  }
}

TEST_CASE("command line: solve writes artefacts and flags beat the file") {
  const fs::path dir = fresh_dir("plfem_test_cli_solve");
  const std::string out = (dir / "run1").string();
  CHECK(cli({"solve", "--r", "2", "--n", "2", "--out", out.c_str()}) == 0);
  CHECK(fs::exists(dir / "run1" / "solution.vtk"));
  CHECK(fs::exists(dir / "run1" / "iterations.csv"));

  const auto cfg_path =
      write_text(dir, "run.cfg", "r = 2\nn = 2\nout = " + out + "\n");
  const std::string out2 = (dir / "run2").string();
  CHECK(cli({"solve", "--config", cfg_path.string().c_str(), "--r", "1.5",
             "--out", out2.c_str()}) == 0);
  const std::vector<std::string> log =
      lines_of(slurp(dir / "run2" / "iterations.csv"));
  REQUIRE(log.size() > 2);
  CHECK(log[1] == "# r = 1.5");
}

TEST_CASE("command line: exit codes separate usage errors from failed runs") {
  const fs::path dir = fresh_dir("plfem_test_cli_codes");
  const std::string out = (dir / "out").string();

  CHECK(cli({"solve", "--bogus"}) == 2);
  CHECK(cli({}) == 2);
  CHECK(cli({"solve", "--r", "1.0", "--out", out.c_str()}) == 2);
  CHECK(cli({"solve", "--r", "1.5", "--max-iters", "1", "--out", out.c_str()}) ==
        1);
  CHECK(cli({"convergence", "--r", "2", "--n", "2", "--levels", "3", "--out",
             out.c_str()}) == 0);
  CHECK(fs::exists(dir / "out" / "convergence.csv"));
  CHECK(cli({"verify"}) == 0);
}
