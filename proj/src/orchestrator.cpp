#include "cran/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cran/phy.hpp"
#include "cran/units.hpp"

namespace cran {
namespace {

double max_alpha_norm(const ElasticContext& cx, const Allocation& al) {
  double m = 0;
  for (int u = 0; u < cx.sc->n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < cx.sc->k1; ++k)
      m = std::max(m, al.alpha[al.wi(u, k)] / cx.rate_scale);
  }
  return m;
}

// Solves one block and applies the result only when it does not worsen the
// elastic objective (and the subproblem did not come back infeasible).
// `allow_increase` drops the descent guard: a repair pass starts from an
// infeasible point whose objective is no benchmark, so the cheapest feasible
// solution is accepted even when it costs more.
bool solve_block_guarded(const ElasticContext& cx, BlockProblem bp,
                         const SolveOptions& opt, Allocation& al,
                         bool allow_increase = false,
                         MultiplierState* warm = nullptr) {
  std::vector<double> z = bp.z0;
  SolveResult r = solve_convex(bp.sp, z, opt, warm);
  if (r.status == SolveStatus::kInfeasible) return false;
  Allocation trial = al;
  apply_solution(cx, bp, z, trial);
  if (!trial.finite()) return false;
  if (!allow_increase) {
    double cur = elastic_objective(cx, al);
    double cand = elastic_objective(cx, trial);
    if (cand > cur * (1.0 + 1e-12) + 1e-12) return false;
  }
  al = std::move(trial);
  return true;
}

// One mini power-refinement pass used both inside the main loop (nothing to
// refine there, shares move too) and after rounding, where only the powers
// and the deficits are still adjustable.
void repair_powers(const ElasticContext& cx, const RunConfig& rc,
                   Allocation& al) {
  // The assignment is frozen here, so every pass solves the same constraint
  // system from a new linearization point; carrying the multipliers forward
  // turns the chain into one continued solve instead of repeated cold starts.
  MultiplierState warm;
  // Short slices per pass: the multipliers carry over, so the chain acts as
  // one long solve re-linearized at every slice, and the pass-level breaks
  // below decide when the chain has earned its keep.
  SolveOptions ro = rc.solver;
  ro.max_iters = std::min(ro.max_iters, 3000);
  // Once the deficits are gone their variables pin to zero; keeping them in
  // the objective normalization would stall the power descent right there.
  ro.pinned_scale = true;
  double prev_obj = elastic_objective(cx, al);
  int stalled = 0;
  for (int r = 0; r < rc.repair_iters; ++r) {
    Allocation prev = al;
    bool applied =
        solve_block_guarded(cx, assemble_power_subproblem(cx, al), ro, al,
                            /*allow_increase=*/true, &warm);
    if (rc.delay_mode == DelayMode::kDynamic) solve_delay_lp(cx, al);
    solve_alpha_lp(cx, al, rc.solver);
    double obj = elastic_objective(cx, al);
    if (std::getenv("CRAN_REPAIR_TRACE"))
      std::fprintf(stderr,
                   "[repair] pass=%d applied=%d obj=%.6f dist=%.3e alpha=%.3e\n",
                   r, int(applied), obj, power_distance(al, prev),
                   max_alpha_norm(cx, al));
    bool flat = std::abs(prev_obj - obj) <=
                1e-4 * std::max(1.0, std::abs(prev_obj));
    prev_obj = obj;
    // A point still carrying deficit gets the whole budget; stopping early
    // there turns a recoverable assignment into a rejection.  Only a clean
    // point may exit on small movement or stalled objective.
    if (max_alpha_norm(cx, al) <= 1e-12) {
      if (power_distance(al, prev) <= rc.eps_th || flat) break;
    } else if (flat) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
  }
}

}  // namespace

Allocation bootstrap_allocation(const Scenario& sc, const ElasticContext& cx) {
  Allocation al = Allocation::zero(sc);
  double third = sc.qos.delay_budget_s / 3.0;
  al.delay.d_rrh.assign(sc.n_rrh(), third);
  al.delay.d_bbu = third;
  al.delay.d_user.assign(sc.n_users(), third);

  // Start over-provisioned instead of dark: every subcarrier time-shared
  // evenly among the users of its cell, fronthaul split across RRHs, half
  // the budget spread over the link slots.  The first iterations then trade
  // slack away instead of having to grow coverage out of nothing.
  std::vector<int> served(static_cast<std::size_t>(sc.n_rrh()) * kDirs, 0);
  for (int u = 0; u < sc.n_users(); ++u)
    if (cx.active[u])
      for (int q = 0; q < kDirs; ++q) ++served[sc.serving(u, q) * kDirs + q];

  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    int n_dl = served[sc.users[u].serve_dl * kDirs + kDl];
    int n_ul = served[sc.users[u].serve_ul * kDirs + kUl];
    for (int k = 0; k < sc.k1; ++k) {
      al.tau[al.ai(u, k, kUl)] = 1.0 / n_ul;
      al.tau[al.ai(u, k, kDl)] = 1.0 / n_dl;
      al.p_ac[al.ai(u, k, kUl)] = 0.5 * sc.p_user_ul / sc.k1;
      al.p_ac[al.ai(u, k, kDl)] =
          0.5 * sc.p_rrh_dl / (static_cast<double>(n_dl) * sc.k1);
      al.alpha[al.wi(u, k)] = cx.alpha0;
    }
  }
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        al.x[al.fi(j, k, q)] = 1.0 / sc.n_rrh();
        al.p_fh[al.fi(j, k, q)] =
            0.5 * (q == kUl ? sc.p_rrh_ul / sc.k2
                            : sc.p_bbu_dl / (sc.n_rrh() * sc.k2));
      }
  return al;
}

int admission_reject(const ElasticContext& cx, const Allocation& al) {
  const Scenario& sc = *cx.sc;
  int best = -1;
  double worst = 0;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    double a = 0;
    for (int k = 0; k < sc.k1; ++k) a = std::max(a, al.alpha[al.wi(u, k)]);
    if (best < 0 || a > worst) {
      best = u;
      worst = a;
    }
  }
  if (best < 0 || worst > 0) return best;

  // No deficits to compare: drop the user carrying the least access rate.
  RateReport rep = aggregate_rates(sc, *cx.ch, al, cx.active);
  best = -1;
  double least = 0;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    double r = rep.user_dl[u];
    for (int k = 0; k < sc.k1; ++k) {
      std::size_t i = al.ai(u, k, kUl);
      r += al.tau[i] * rep.r_ac[i];
    }
    if (best < 0 || r < least) {
      best = u;
      least = r;
    }
  }
  return best;
}

RunResult run_algorithm1(const Scenario& sc, const ChannelRealization& ch,
                         const RunConfig& rc) {
  RunResult res;
  res.admitted.assign(sc.n_users(), 1);
  res.alloc = Allocation::zero(sc);

  while (true) {
    bool any = false;
    for (char a : res.admitted) any = any || a;
    if (!any) {
      res.status = RunStatus::kNoUsersLeft;
      res.residuals = evaluate_constraints(sc, ch, res.alloc, res.admitted);
      res.feasible = true;
      res.total_power_w = 0;
      res.total_power_dbm = watt_to_dbm(kNoiseFloorW);
      return res;
    }

    ElasticContext cx = ElasticContext::make(sc, ch, res.admitted);
    cx.drop_extra_budgets = rc.noac_relax;
    cx.power_box_factor = rc.noac_relax ? 100.0 : 1.0;

    Allocation al = bootstrap_allocation(sc, cx);
    res.round_starts.push_back(static_cast<int>(res.objective_trace.size()));

    Allocation prev = al;
    double traced = elastic_objective(cx, al);
    bool converged = false;
    int iters = 0;
    MultiplierState warm_t, warm_p;
    for (int z = 1; z <= rc.z_th; ++z) {
      Allocation snap = al;
      solve_block_guarded(cx, assemble_subcarrier_subproblem(cx, al),
                          rc.solver, al, false, &warm_t);
      solve_block_guarded(cx, assemble_power_subproblem(cx, al), rc.solver, al,
                          false, &warm_p);
      if (rc.delay_mode == DelayMode::kDynamic) solve_delay_lp(cx, al);
      solve_alpha_lp(cx, al, rc.solver);

      // The deficit step can grow the objective when the exact rates fall
      // short of the block surrogates; reverting keeps the descent strict
      // and ends the round through the movement test.
      double cand = elastic_objective(cx, al);
      if (cand > traced + 1e-12 * std::max(1.0, std::abs(traced)))
        al = std::move(snap);
      else
        traced = cand;
      res.objective_trace.push_back(traced);
      iters = z;

      if (power_distance(al, prev) <= rc.eps_th) {
        converged = true;
        break;
      }
      prev = al;
    }
    res.outer_iters = iters;
    res.total_outer_iters += iters;

    // Hard assignment plus power repair, then the exact verdict.  The
    // shared loop may stop with deficits still open (a rejected power block
    // keeps the movement test at zero); the repair passes resolve those, so
    // admission is judged on the repaired hard point, not the shared one.
    // Only the exact residuals decide: the internal relief variables are
    // conservative by construction and may stay marginally positive at
    // points the true system accepts.
    Allocation hard = al;
    round_timesharing(cx, hard, rc.round_threshold);
    repair_powers(cx, rc, hard);
    ConstraintReport rep = evaluate_constraints(sc, ch, hard, res.admitted);
    double hard_alpha = max_alpha_norm(cx, hard);
    bool ok = rep.worst >= -1e-6;

    // Power alone cannot close a floor that the argmax assignment starved;
    // shifting one slot at a time toward the deepest uncovered floor can.
    // A move may transfer the deficit before the chain resolves it, so a few
    // non-improving moves are tolerated and the best point seen is kept.
    Allocation best_hard = hard;
    ConstraintReport best_rep = rep;
    double best_alpha = hard_alpha;
    int setbacks = 0;
    for (int e = 0; !ok && e < 4 * sc.k1; ++e) {
      if (!escalate_assignment(cx, hard)) break;
      repair_powers(cx, rc, hard);
      rep = evaluate_constraints(sc, ch, hard, res.admitted);
      hard_alpha = max_alpha_norm(cx, hard);
      ok = rep.worst >= -1e-6;
      if (rep.worst > best_rep.worst + 1e-9) {
        best_hard = hard;
        best_rep = rep;
        best_alpha = hard_alpha;
        setbacks = 0;
      } else if (!ok && ++setbacks >= 3) {
        break;
      }
    }
    if (!ok && best_rep.worst > rep.worst) {
      hard = std::move(best_hard);
      rep = best_rep;
      hard_alpha = best_alpha;
    }
    if (std::getenv("CRAN_AC_TRACE")) {
      int na = 0, wf = -1;
      for (char a : res.admitted) na += a;
      for (int f = 0; f < 15; ++f)
        if (rep.family[f] == rep.worst) { wf = f; break; }
      std::fprintf(stderr,
                   "[ac] users=%d worst=%.3e (C%d) alpha=%.3e ok=%d\n",
                   na, rep.worst, wf + 1, hard_alpha, int(ok));
    }

    if (ok || !rc.ac_enabled) {
      // Shed surplus slots before reporting: the argmax assignment hands out
      // every subcarrier, and unneeded ones still pay the reliability SINR
      // floor.  Each removal is feasibility-checked, so the shed point is
      // good as is; the extra repair pass on top is optional polish.
      bool polish_more = ok;
      for (int stage = 0; polish_more && stage < 3; ++stage) {
        for (int pass = 0; pass < 4 && prune_assignment(cx, hard); ++pass) {
          rep = evaluate_constraints(sc, ch, hard, res.admitted);
          Allocation polished = hard;
          repair_powers(cx, rc, polished);
          ConstraintReport prep = evaluate_constraints(sc, ch, polished,
                                                       res.admitted);
          double palpha = max_alpha_norm(cx, polished);
          if (std::getenv("CRAN_AC_TRACE"))
            std::fprintf(stderr,
                         "[polish] pruned=%.4f W polished=%.4f W worst=%.3e\n",
                         total_power(sc, hard, res.admitted),
                         total_power(sc, polished, res.admitted), prep.worst);
          if (prep.worst >= -1e-6 &&
              total_power(sc, polished, res.admitted) <
                  total_power(sc, hard, res.admitted)) {
            hard = std::move(polished);
            rep = prep;
            hard_alpha = palpha;
          } else {
            // The repair did not move the point, so another prune would see
            // the same slots again.
            break;
          }
        }

        // An expensive slot can stay unprunable solely because the powers
        // were balanced around its presence; with an active flow coupling
        // the gradient descent is too slow to shed it on its own.  Drop the
        // priciest slots speculatively with a full repair in between and
        // keep whatever turns out feasible and cheaper.
        polish_more = false;
        struct Spec {
          double p;
          int fh;
          std::size_t slot;
        };
        std::vector<Spec> specs;
        for (std::size_t s = 0; s < hard.x.size(); ++s)
          if (hard.x[s] > 0.5 && hard.p_fh[s] > 1e-3)
            specs.push_back({hard.p_fh[s], 1, s});
        for (std::size_t s = 0; s < hard.tau.size(); ++s)
          if (hard.tau[s] > 0.5 && hard.p_ac[s] > 1e-3)
            specs.push_back({hard.p_ac[s], 0, s});
        std::stable_sort(specs.begin(), specs.end(),
                         [](const Spec& a, const Spec& b) { return a.p > b.p; });
        int tests = 0;
        for (const Spec& c : specs) {
          if (tests >= 3) break;
          ++tests;
          Allocation trial = hard;
          if (c.fh) {
            trial.x[c.slot] = 0;
            trial.p_fh[c.slot] = 0;
          } else {
            trial.tau[c.slot] = 0;
            trial.p_ac[c.slot] = 0;
          }
          repair_powers(cx, rc, trial);
          ConstraintReport prep = evaluate_constraints(sc, ch, trial,
                                                       res.admitted);
          bool keep = prep.worst >= -1e-6 &&
                      total_power(sc, trial, res.admitted) <
                          total_power(sc, hard, res.admitted);
          if (std::getenv("CRAN_AC_TRACE"))
            std::fprintf(stderr,
                         "[spec] %s slot=%zu p=%.4f -> %.4f W worst=%.3e %s\n",
                         c.fh ? "fh" : "ac", c.slot, c.p,
                         total_power(sc, trial, res.admitted), prep.worst,
                         keep ? "KEEP" : "revert");
          if (keep) {
            hard = std::move(trial);
            rep = prep;
            hard_alpha = max_alpha_norm(cx, hard);
            polish_more = true;
            break;
          }
        }
      }
      res.alloc = std::move(hard);
      res.residuals = rep;
      res.max_alpha = hard_alpha * cx.rate_scale;
      res.feasible = ok;
      res.total_power_w = total_power(sc, res.alloc, res.admitted);
      res.total_power_dbm =
          watt_to_dbm(std::max(res.total_power_w, kNoiseFloorW));
      res.status = converged ? RunStatus::kConverged : RunStatus::kIterLimit;
      return res;
    }

    // Unserved demand survived the repair: drop the worst-deficit user and
    // start the next admission round.
    int victim = admission_reject(cx, hard_alpha > 0 ? hard : al);
    if (victim < 0) {
      res.status = RunStatus::kNoUsersLeft;
      res.residuals = evaluate_constraints(sc, ch, res.alloc, res.admitted);
      return res;
    }
    res.admitted[victim] = 0;
    res.rejected.push_back(victim);
  }
}

}  // namespace cran
