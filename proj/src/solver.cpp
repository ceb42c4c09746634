#include "cran/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace cran {

double Expr::value(const std::vector<double>& z) const {
  double v = c0 + lin.dot(z);
  for (const auto& lt : logs) v += lt.coef * std::log(lt.c0 + lt.arg.dot(z));
  for (const auto& rt : roots) {
    double e = rt.scale * z[rt.var];
    if (e <= 0) continue;
    v += rt.coef * std::sqrt(e * (e + 2.0 * rt.sigma)) / (rt.sigma + e);
  }
  return v;
}

void Expr::accumulate_grad(const std::vector<double>& z,
                           std::vector<double>& grad, double w) const {
  for (std::size_t i = 0; i < lin.idx.size(); ++i)
    grad[lin.idx[i]] += w * lin.coef[i];
  for (const auto& lt : logs) {
    double a = lt.c0 + lt.arg.dot(z);
    double f = w * lt.coef / a;
    for (std::size_t i = 0; i < lt.arg.idx.size(); ++i)
      grad[lt.arg.idx[i]] += f * lt.arg.coef[i];
  }
  for (const auto& rt : roots) {
    double e = rt.scale * z[rt.var];
    // Flatten the infinite slope at e = 0 (same guard as the DC pieces).
    if (e <= 1e-12 * rt.sigma) continue;
    double psi = std::sqrt(e * (e + 2.0 * rt.sigma));
    double pi = rt.sigma + e;
    grad[rt.var] += w * rt.coef * rt.scale * rt.sigma * rt.sigma / (psi * pi * pi);
  }
}

namespace {

struct Workspace {
  std::vector<double> zp;     // physical point
  std::vector<double> width;  // box widths
  std::vector<double> g;      // gradient in normalized coords
  std::vector<double> cval;   // normalized constraint values
  std::vector<double> lam;    // multipliers
};

}  // namespace

SolveResult solve_convex(const Subproblem& sp, std::vector<double>& z,
                         const SolveOptions& opt, MultiplierState* warm) {
  const int n = sp.n;
  const int m = static_cast<int>(sp.cons.size());
  SolveResult res;

  Workspace w;
  w.width.resize(n);
  for (int i = 0; i < n; ++i) w.width[i] = std::max(sp.hi[i] - sp.lo[i], 1e-30);
  w.zp.resize(n);
  w.g.assign(n, 0.0);
  w.cval.assign(m, 0.0);
  w.lam.assign(m, 0.0);
  if (warm && static_cast<int>(warm->lam.size()) == m) w.lam = warm->lam;

  // Normalized start inside the box.
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i)
    u[i] = std::clamp((z[i] - sp.lo[i]) / w.width[i], 0.0, 1.0);

  // Objective normalization keeps the Armijo test and the stationarity
  // measure meaningful across watt-scale and penalty-scale terms.
  double obj_scale = 1.0;
  {
    std::vector<double> og(n, 0.0);
    for (int i = 0; i < n; ++i) w.zp[i] = sp.lo[i] + w.width[i] * u[i];
    sp.obj.accumulate_grad(w.zp, og, 1.0);
    double s = 0;
    for (int i = 0; i < n; ++i) {
      if (opt.pinned_scale) {
        if (u[i] <= 0.0 && og[i] > 0) continue;
        if (u[i] >= 1.0 && og[i] < 0) continue;
      }
      s += std::abs(og[i]) * w.width[i];
    }
    obj_scale = std::max(1e-12, s);
  }

  auto to_phys = [&](const std::vector<double>& un) {
    for (int i = 0; i < n; ++i) w.zp[i] = sp.lo[i] + w.width[i] * un[i];
  };

  double rho = (warm && warm->rho > 0) ? warm->rho : 10.0;

  auto eval = [&](const std::vector<double>& un, std::vector<double>* grad) {
    to_phys(un);
    double val = sp.obj.value(w.zp) / obj_scale;
    if (grad) {
      std::fill(grad->begin(), grad->end(), 0.0);
      sp.obj.accumulate_grad(w.zp, *grad, 1.0 / obj_scale);
    }
    if (!sp.obj_quad.empty()) {
      for (int i = 0; i < n; ++i) {
        val += 0.5 * sp.obj_quad[i] * w.zp[i] * w.zp[i] / obj_scale;
        if (grad) (*grad)[i] += sp.obj_quad[i] * w.zp[i] / obj_scale;
      }
    }
    for (int c = 0; c < m; ++c) {
      double cv = sp.cons[c].value(w.zp) / sp.scale[c];
      w.cval[c] = cv;
      double t = w.lam[c] - rho * cv;
      if (t > 0) {
        val += (t * t - w.lam[c] * w.lam[c]) / (2.0 * rho);
        if (grad) sp.cons[c].accumulate_grad(w.zp, *grad, -t / sp.scale[c]);
      } else {
        val -= w.lam[c] * w.lam[c] / (2.0 * rho);
      }
    }
    if (grad)
      for (int i = 0; i < n; ++i) (*grad)[i] *= w.width[i];
    return val;
  };

  auto violation = [&]() {
    double v = 0;
    for (int c = 0; c < m; ++c) v = std::max(v, -w.cval[c]);
    return v;
  };

  std::vector<double> un = u, g(n), gprev(n), uprev(n), utrial(n);
  int total_iters = 0;
  double inner_tol = std::max(1e-3, opt.tol);
  double prev_viol = 1e30;
  int stall = 0;
  double prev_outer_obj = 1e300;
  int flat_rounds = 0;

  for (int outer = 0; outer < 150; ++outer) {
    double fval = eval(un, &g);
    double step = 1.0;
    std::vector<double> fmem(5, fval);
    double pg = 0;
    double f_best = fval;
    double f_mark = fval;
    int it_mark = total_iters;

    while (total_iters < opt.max_iters) {
      // Projected gradient norm as the inner stationarity measure.
      pg = 0;
      for (int i = 0; i < n; ++i) {
        double t = std::clamp(un[i] - g[i], 0.0, 1.0) - un[i];
        pg = std::max(pg, std::abs(t));
      }
      if (pg <= inner_tol) break;

      double fref = *std::max_element(fmem.begin(), fmem.end());
      double alpha = step;
      double ftrial = 0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        double descent = 0;
        for (int i = 0; i < n; ++i) {
          utrial[i] = std::clamp(un[i] - alpha * g[i], 0.0, 1.0);
          descent += g[i] * (utrial[i] - un[i]);
        }
        ftrial = eval(utrial, nullptr);
        if (ftrial <= fref + 1e-4 * descent || descent >= -1e-18) {
          accepted = true;
          break;
        }
        alpha *= 0.3;
      }
      if (!accepted) break;

      uprev = un;
      gprev = g;
      un = utrial;
      fval = ftrial;
      fmem[total_iters % 5] = fval;
      eval(un, &g);
      ++total_iters;

      // Barzilai-Borwein step for the next round.
      double sty = 0, sts = 0;
      for (int i = 0; i < n; ++i) {
        double si = un[i] - uprev[i];
        sts += si * si;
        sty += si * (g[i] - gprev[i]);
      }
      if (sty > 1e-30)
        step = std::clamp(sts / sty, 1e-8, 1e8);
      else
        step = std::min(step * 2.0, 1e8);
      if (sts <= 1e-30) break;  // pinned to a box face

      // Near-feasible and barely moving: the remaining descent is not worth
      // the iterations, hand control back to the multiplier update.  The
      // best value seen is the progress measure; the iterate oscillates, and
      // so does its distance to the boundary, hence the slack on the
      // feasibility gate here.
      f_best = std::min(f_best, fval);
      if (total_iters - it_mark >= 256) {
        bool feas = true;
        for (int c = 0; c < m; ++c)
          if (w.cval[c] < -10.0 * opt.tol) { feas = false; break; }
        if (feas && f_mark - f_best <= 1e-5 * std::max(1.0, std::abs(f_mark)))
          break;
        f_mark = f_best;
        it_mark = total_iters;
      }
    }

    eval(un, nullptr);
    double viol = violation();

    // Multiplier update.
    for (int c = 0; c < m; ++c) w.lam[c] = std::max(0.0, w.lam[c] - rho * w.cval[c]);

    // Plain objective value, without the penalty terms, for the progress test.
    double outer_obj = sp.obj.value(w.zp) / obj_scale;
    if (!sp.obj_quad.empty())
      for (int i = 0; i < n; ++i)
        outer_obj += 0.5 * sp.obj_quad[i] * w.zp[i] * w.zp[i] / obj_scale;
    bool flat = viol <= 10.0 * opt.tol &&
                std::abs(prev_outer_obj - outer_obj) <=
                    1e-5 * std::max(1.0, std::abs(outer_obj));
    flat_rounds = flat ? flat_rounds + 1 : 0;
    prev_outer_obj = outer_obj;

    if ((viol <= opt.tol && pg <= opt.tol) || flat_rounds >= 2) {
      res.status = SolveStatus::kOptimal;
      res.iters = total_iters;
      res.max_violation = viol;
      res.stationarity = pg;
      for (int i = 0; i < n; ++i) z[i] = sp.lo[i] + w.width[i] * un[i];
      if (warm) { warm->lam = w.lam; warm->rho = rho; }
      if (std::getenv("CRAN_SOLVER_TRACE"))
        std::fprintf(stderr, "[solver] n=%d m=%d it=%d %s obj=%.6g viol=%.2e pg=%.2e\n",
                     n, m, total_iters, flat_rounds >= 2 ? "flat" : "kkt",
                     outer_obj * obj_scale, viol, pg);
      return res;
    }
    if (total_iters >= opt.max_iters) break;

    if (viol > 0.25 * prev_viol) {
      rho = std::min(rho * 5.0, 1e10);
      ++stall;
    } else {
      stall = 0;
    }
    if (rho >= 1e10 && viol > 100.0 * opt.tol && stall >= 4) {
      res.status = SolveStatus::kInfeasible;
      res.iters = total_iters;
      res.max_violation = viol;
      res.stationarity = pg;
      for (int i = 0; i < n; ++i) z[i] = sp.lo[i] + w.width[i] * un[i];
      if (warm) { warm->lam = w.lam; warm->rho = rho; }
      return res;
    }
    prev_viol = viol;
    inner_tol = std::max(opt.tol, inner_tol * 0.2);
  }

  eval(un, nullptr);
  res.status = SolveStatus::kIterLimit;
  res.iters = total_iters;
  res.max_violation = violation();
  for (int i = 0; i < n; ++i) z[i] = sp.lo[i] + w.width[i] * un[i];
  if (warm) { warm->lam = w.lam; warm->rho = rho; }
  if (std::getenv("CRAN_SOLVER_TRACE"))
    std::fprintf(stderr, "[solver] n=%d m=%d it=%d limit obj=%.6g viol=%.2e\n",
                 n, m, total_iters, sp.obj.value(w.zp), res.max_violation);
  return res;
}

}  // namespace cran
