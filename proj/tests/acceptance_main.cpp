// Acceptance gate: one pass/fail line per criterion, exit 0 only if all
// pass.  The solve-dependent criteria share three benchmark studies (one per
// exponent) anchored at the 4-cell base mesh with three refinements; the
// asymptotic clauses are asserted on the refined rows, the base row is
// computed with them and counts toward the runtime budget.

#include "plfem/cli_io.hpp"
#include "plfem/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

using namespace plfem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string description;
};

void print(int number, const Criterion& c) {
  std::printf("criterion-%d %s  measured=%.3e threshold=%.3e  (%s)\n", number,
              c.pass ? "PASS" : "FAIL", c.measured, c.threshold,
              c.description.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const unsigned seed = 2024;
  const std::vector<double> exponents = {1.5, 2.0, 2.5};
  bool all_pass = true;

  // -- 1: derived exponents on a dense sweep of both dimensions ------------
  {
    const auto t0 = Clock::now();
    const CheckResult c = check_exponent_sweep(1000);
    const double elapsed = seconds_since(t0);
    Criterion crit{c.pass && elapsed < 1.0, c.measured, c.threshold,
                   "exponent branch formulas, 1000-point sweep, d = 2 and 3, " +
                       std::to_string(elapsed).substr(0, 5) + " s"};
    all_pass &= crit.pass;
    print(1, crit);
  }

  // -- 2: RT0 normal-trace pattern on the refined benchmark mesh -----------
  {
    const auto t0 = Clock::now();
    const CheckResult c = check_rt_dof_pattern(level_mesh(2, 2));
    const double elapsed = seconds_since(t0);
    Criterion crit{c.pass && c.measured <= 1e-13 && elapsed < 1.0, c.measured,
                   1e-13,
                   "RT0 traces are 0/1 on every facet of the level-2 mesh, " +
                       std::to_string(elapsed).substr(0, 5) + " s"};
    all_pass &= crit.pass;
    print(2, crit);
  }

  // -- shared benchmark studies: base mesh n = 2 plus three refinements ----
  std::map<double, std::vector<LevelState>> states;
  std::map<double, ConvergenceTable> tables;
  const auto t_studies = Clock::now();
  for (double r : exponents) {
    const PowerLawParams prm = PowerLawParams::make(r);
    std::vector<LevelState> ls;
    tables.emplace(r, run_convergence_study(case_M1(), prm, 2, 4,
                                            SolverConfig{}, &ls));
    states.emplace(r, std::move(ls));
  }
  const double study_seconds = seconds_since(t_studies);
  const std::vector<int> refined_rows = {1, 2, 3};

  // -- 3: lifted velocity is divergence free at every solution -------------
  {
    double worst = 0.0;
    bool pass = true;
    for (double r : exponents) {
      const PowerLawParams prm = PowerLawParams::make(r);
      for (int row : refined_rows) {
        const CheckResult dl =
            check_lifted_divergence(states.at(r)[row], prm, 1e-8);
        const CheckResult dc =
            check_coarse_divergence(states.at(r)[row], prm, 1e-8);
        worst = std::max({worst, dl.measured, dc.measured});
        pass = pass && dl.pass && dc.pass;
      }
    }
    Criterion crit{pass, worst, 1e-8,
                   "div L(u_h,p_h) and (q_H, div u_h) vanish at solutions, "
                   "r = 1.5, 2, 2.5 on three refinement levels"};
    all_pass &= crit.pass;
    print(3, crit);
  }

  // -- 4: convective pairing is skew at solutions ---------------------------
  {
    double worst = 0.0;
    bool pass = true;
    for (double r : exponents) {
      const PowerLawParams prm = PowerLawParams::make(r);
      for (int row : refined_rows) {
        const CheckResult c = check_skew_pairing(states.at(r)[row], prm, 1e-10);
        worst = std::max(worst, c.measured);
        pass = pass && c.pass;
      }
    }
    Criterion crit{pass, worst, 1e-10,
                   "(L x u_h, grad u_h) ~ 0 at every criterion-3 solution"};
    all_pass &= crit.pass;
    print(4, crit);
  }

  // -- 5: Fortin interpolant preserves divergence against Q_H --------------
  {
    double worst = 0.0;
    bool pass = true;
    for (int level : {1, 2}) {
      const CheckResult c =
          check_fortin_identity(level_mesh(2, level), 20, seed, 1e-10);
      worst = std::max(worst, c.measured);
      pass = pass && c.pass;
    }
    Criterion crit{pass, worst, 1e-10,
                   "(div(v - I v), q_H) = 0 for 20 random smooth fields on "
                   "two mesh levels"};
    all_pass &= crit.pass;
    print(5, crit);
  }

  // -- 6: energy identity and h-independent a-priori bound ------------------
  {
    double worst_energy = 0.0;
    double worst_spread = 0.0;
    bool pass = true;
    for (double r : exponents) {
      const PowerLawParams prm = PowerLawParams::make(r);
      const VectorFn f = forcing_function(case_M1(), prm);
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (int row : refined_rows) {
        const CheckResult en =
            check_energy_identity(states.at(r)[row], prm, f, 1e-9);
        worst_energy = std::max(worst_energy, en.measured);
        pass = pass && en.pass;
        const AprioriReport rep =
            apriori_quantities(states.at(r)[row].mesh, states.at(r)[row].rt,
                               prm, states.at(r)[row].state);
        const double sum =
            rep.u_energy + rep.lift_norm + rep.stab_energy + rep.p_norm;
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
      }
      worst_spread = std::max(worst_spread, hi / lo);
    }
    pass = pass && worst_spread <= 3.0;
    Criterion crit{pass, worst_energy, 1e-9,
                   "energy gap <= 1e-9 x |<f,u_h>|; bounded-quantity sum "
                   "spread " +
                       std::to_string(worst_spread).substr(0, 5) +
                       " <= 3 across three refinement levels"};
    all_pass &= crit.pass;
    print(6, crit);
  }

  // -- 7: stabilisation energy decays under refinement ----------------------
  {
    double worst_ratio = 0.0;
    bool pass = true;
    for (double r : exponents) {
      const auto& rows = tables.at(r).rows;
      for (size_t i = 2; i < rows.size(); ++i) {
        const double ratio = rows[i].s_php / rows[i - 1].s_php;
        worst_ratio = std::max(worst_ratio, ratio);
        pass = pass && rows[i].s_php < rows[i - 1].s_php;
      }
    }
    Criterion crit{pass, worst_ratio, 1.0,
                   "s(p_h,p_h) strictly decreases across the refinement "
                   "levels for r = 1.5, 2, 2.5"};
    all_pass &= crit.pass;
    print(7, crit);
  }

  // -- 8: convergence orders and runtime budget -----------------------------
  {
    const double order = tables.at(2.0).rows.back().order_u_w1r;
    bool monotone = true;
    for (double r : {1.5, 2.5}) {
      const auto& rows = tables.at(r).rows;
      for (size_t i = 2; i < rows.size(); ++i) {
        monotone = monotone && rows[i].err_u_w1r <= rows[i - 1].err_u_w1r &&
                   rows[i].err_u_l2rt <= rows[i - 1].err_u_l2rt &&
                   rows[i].err_p_lrt <= rows[i - 1].err_p_lrt;
      }
    }
    const bool pass = order >= 0.8 && monotone && study_seconds <= 600.0;
    Criterion crit{pass, order, 0.8,
                   "velocity order between the two finest meshes at r = 2; "
                   "error columns non-increasing for r = 1.5, 2.5; studies "
                   "took " +
                       std::to_string(study_seconds).substr(0, 6) +
                       " s <= 600 s"};
    all_pass &= crit.pass;
    print(8, crit);
  }

  // -- 9: jump control of the coarse fluctuation is mesh independent --------
  {
    double worst_spread = 0.0;
    bool pass = true;
    for (double r : {1.5, 1.75, 2.0}) {
      const PowerLawParams prm = PowerLawParams::make(r);
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (int level : {1, 2, 3}) {
        const double c =
            jump_control_constant(level_mesh(2, level), prm, 100, seed);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      const double spread = hi / lo;
      worst_spread = std::max(worst_spread, spread);
      pass = pass && spread <= 2.0;
    }
    Criterion crit{pass, worst_spread, 2.0,
                   "fluctuation/jump ratio over 100 random fields varies by "
                   "<= 2x across three mesh levels, all alpha branches"};
    all_pass &= crit.pass;
    print(9, crit);
  }

  std::printf("acceptance: %s\n", all_pass ? "9/9 criteria passed"
                                           : "FAILURES present");
  return all_pass ? 0 : 1;
}
