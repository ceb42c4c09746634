#pragma once

#include <vector>

#include "cran/allocation.hpp"
#include "cran/scenario.hpp"
#include "cran/solver.hpp"
#include "cran/subproblems.hpp"

namespace cran {

enum class DelayMode { kDynamic, kFixed };

// Knobs of the iterative allocation run.  Defaults match the reference
// operating point; experiments override selectively.
struct RunConfig {
  bool ac_enabled = true;        // reject users while deficits persist
  bool noac_relax = false;       // baseline: widened boxes, fewer budgets
  DelayMode delay_mode = DelayMode::kDynamic;
  double eps_th = 1e-4;          // outer stop: power movement below this
  int z_th = 100;                // outer iteration cap per admission round
  SolveOptions solver;           // inner convex solver settings
  double round_threshold = 1e-3; // minimum share that can win a subcarrier
  int repair_iters = 40;         // power refinement rounds after rounding
  double alpha_tol = 1e-6;       // normalized deficit considered zero
};

enum class RunStatus { kConverged, kIterLimit, kNoUsersLeft };

struct RunResult {
  RunStatus status = RunStatus::kIterLimit;
  std::vector<char> admitted;           // final active set per user pair
  std::vector<int> rejected;            // rejection order
  Allocation alloc;                     // final rounded point
  double total_power_w = 0;
  double total_power_dbm = 0;
  int outer_iters = 0;                  // iterations of the final round
  int total_outer_iters = 0;            // across all admission rounds
  std::vector<double> objective_trace;  // elastic objective, all rounds
  std::vector<int> round_starts;        // trace index where each round began
  ConstraintReport residuals;           // exact residuals at the final point
  double max_alpha = 0;                 // largest final deficit (bit/s)
  bool feasible = false;

  int n_admitted() const {
    int n = 0;
    for (char a : admitted) n += a != 0;
    return n;
  }
};

// Full run: elastic block iterations, admission control, hard assignment
// with power repair, exact feasibility report.
RunResult run_algorithm1(const Scenario& sc, const ChannelRealization& ch,
                         const RunConfig& rc);

// Starting point of one admission round: even delay split, substantial
// deficit slack, and uniform half-budget powers so the first assignment
// step sees live links on every subcarrier.
Allocation bootstrap_allocation(const Scenario& sc, const ElasticContext& cx);

// Admission victim: the user holding the largest deficit; if every deficit
// is zero, the one with the least carried access rate.  Lowest index on
// ties.  Returns -1 when no user is active.
int admission_reject(const ElasticContext& cx, const Allocation& al);

}  // namespace cran
