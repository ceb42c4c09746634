#pragma once

#include <array>
#include <vector>

#include "cran/allocation.hpp"
#include "cran/dc.hpp"
#include "cran/phy.hpp"
#include "cran/qos.hpp"
#include "cran/scenario.hpp"
#include "cran/solver.hpp"

namespace cran {

// Links with a smaller share than this count as unassigned when blocks pick
// their variables; dust shares below it carry no usable rate (the effective
// SINR sits under the reliability floor) and would only poison the power
// step.  The rounding threshold is a separate, coarser knob.
constexpr double kAssignEps = 1e-6;

// Shared state of one elastic solve round: which users are admitted, the
// penalty weight, and the normalization applied to the deficit slacks.
// alpha is stored in bit/s in Allocation; the solver works on alpha/rate_scale.
struct ElasticContext {
  const Scenario* sc = nullptr;
  const ChannelRealization* ch = nullptr;
  std::vector<char> active;
  double rate_scale = 1;   // bit/s per unit of normalized alpha
  double big_m = 0;        // objective weight per unit of normalized alpha
  double alpha0 = 0;       // initial alpha (bit/s), 10x the largest threshold
  double alpha_cap = 0;    // variable bound (bit/s)
  // Baseline without admission control: per-user and fronthaul power budgets
  // and fronthaul exclusivity are dropped, power boxes are widened instead.
  bool drop_extra_budgets = false;
  double power_box_factor = 1.0;

  static ElasticContext make(const Scenario& sc, const ChannelRealization& ch,
                             std::vector<char> active);
};

// A block subproblem plus the mapping from solver variables back to
// allocation slots.
struct BlockProblem {
  Subproblem sp;
  // kind: 0 tau, 1 x, 2 p_ac, 3 p_fh, 4 alpha (normalized)
  struct Slot {
    int kind;
    std::size_t offset;
  };
  std::vector<Slot> slots;
  std::vector<double> z0;
};

// Joint time-sharing assignment step (tau, x, alpha variables; powers and
// delays frozen at the expansion point).
BlockProblem assemble_subcarrier_subproblem(const ElasticContext& cx,
                                            const Allocation& at);

// Joint power step (powers of currently assigned links plus alpha).
BlockProblem assemble_power_subproblem(const ElasticContext& cx,
                                       const Allocation& at);

// Writes a solver point back into the allocation.
void apply_solution(const ElasticContext& cx, const BlockProblem& bp,
                    const std::vector<double>& z, Allocation& al);

// Value of the elastic objective sum(tau*p) + sum(x*p) + M*sum(alpha/rs).
double elastic_objective(const ElasticContext& cx, const Allocation& al);

// Delay split adjustment: distributes each chain's budget over the three
// queues.  All constraints are affine in D (the per-queue rate thresholds
// turn into lower bounds D_c >= Lmin_c), so the maximin-slack solution is
// closed form: equalize the slack of every queue bound and of the tightest
// chain budget.  Rates are taken at the current allocation with the alpha
// relief added.  Returns false (split untouched) when no feasible split
// exists at current rates.
bool solve_delay_lp(const ElasticContext& cx, Allocation& al);

// Minimal total deficit slack covering the elastic constraints at the
// current rates; updates al.alpha in place.  Returns the max entry (bit/s).
double solve_alpha_lp(const ElasticContext& cx, Allocation& al,
                      const SolveOptions& opt = {});

// Hard assignment: per (RRH, subcarrier, direction) the largest fraction
// wins if it exceeds `threshold` (lowest index on ties); fronthaul likewise.
// Powers of dropped links are zeroed.
void round_timesharing(const ElasticContext& cx, Allocation& al,
                       double threshold = 1e-3);

// Grants one additional access slot at a hard (rounded) point to the deepest
// uncovered rate floor: the starved user downlink, a cell's uplink pool, or a
// slice reservation.  The receiver takes its best-gain subcarrier from a
// winner that holds at least two slots in that direction and is not itself
// starved.  Returns false when no deficit or no legal donor remains.
bool escalate_assignment(const ElasticContext& cx, Allocation& al);

// Drops assigned slots whose removal keeps the exact constraint system
// satisfied, most expensive first.  Every assigned slot pays the reliability
// SINR floor, so slots the queues do not need are pure cost.  Returns true
// if anything was removed.
bool prune_assignment(const ElasticContext& cx, Allocation& al);

// Shrinks slot powers multiplicatively while the exact constraint system
// stays satisfied.  The joint power step sizes its moves by the active
// coupling curvature and so barely advances the cheap directions; this pass
// collects what it leaves on the table.  Returns true if anything moved.
bool trim_powers(const ElasticContext& cx, Allocation& al);

// Relative residuals of the full constraint system at a point, worst case
// per family (index 0 = C1 ... 14 = C15).  Positive = satisfied.  Families
// with no applicable member report +1.
struct ConstraintReport {
  std::array<double, 15> family{};
  double worst = 0;
};

ConstraintReport evaluate_constraints(const Scenario& sc,
                                      const ChannelRealization& ch,
                                      const Allocation& al,
                                      const std::vector<char>& active);

// Minimum-SINR equivalents of the reliability constraints, derived from the
// piecewise error-probability model at target xi (plus optional relief).
double c2_sinr_threshold(const Scenario& sc, double relief);
double c6_sinr_threshold(const Scenario& sc, double relief);

}  // namespace cran
