#include "cran/subproblems.hpp"

#include <algorithm>
#include <cmath>

#include "cran/qfunc.hpp"
#include "cran/units.hpp"

namespace cran {
namespace {

// Minimal service rates of the three queue stages at a given delay split.
struct RateThresholds {
  std::vector<double> rrh;    // valid where rrh_used
  std::vector<char> rrh_used;
  double bbu = 0;
  std::vector<double> user;   // valid for active users
};

RateThresholds compute_thresholds(const Scenario& sc, const DelaySplit& split,
                                  const std::vector<char>& active) {
  const auto& q = sc.qos;
  RateThresholds t;
  t.rrh.assign(sc.n_rrh(), 0.0);
  t.rrh_used.assign(sc.n_rrh(), 0);
  t.user.assign(sc.n_users(), 0.0);
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!active[u]) continue;
    t.rrh_used[sc.users[u].serve_ul] = 1;
    t.user[u] = min_rate_threshold(q.delta_user, q.theta_user, split.d_user[u]);
  }
  for (int j = 0; j < sc.n_rrh(); ++j)
    if (t.rrh_used[j])
      t.rrh[j] = min_rate_threshold(q.delta_rrh, q.theta_rrh, split.d_rrh[j]);
  t.bbu = min_rate_threshold(q.delta_bbu, q.theta_bbu, split.d_bbu);
  return t;
}

// One access link prepared for block assembly.  The block variable z is tau
// (power frozen) or p (share frozen); in both cases the own signal is
// own_coef * z and the interference is sum of coef * z over coupled links,
// so one set of expression builders serves both blocks.
struct AcLink {
  int u = 0, k = 0, q = 0;
  std::size_t slot = 0;  // index into Allocation tau/p_ac
  int var = -1;          // solver variable
  double own_coef = 0;   // dE/dz of the own link
  double z0 = 0;         // expansion value of the own variable
  double e0 = 0, nfull = 0, nfix = 0;
  double own_df = 0, own_dy = 0;
  AccessDcScalar d;
  std::vector<int> xvar;       // coupled variables (co-subcarrier, other cell)
  std::vector<double> xcoef;   // dN/dz of each coupled link
  std::vector<double> xz0;     // their expansion values
};

enum class BlockMode { kByShare, kByPower };

// Collects the access links that carry block variables, with their
// interference couplings and first-order data at the expansion point.
std::vector<AcLink> build_access_links(const ElasticContext& cx,
                                       const Allocation& at, BlockMode mode,
                                       const std::vector<int>& var_of_slot) {
  const Scenario& sc = *cx.sc;
  const ChannelRealization& ch = *cx.ch;
  std::vector<double> inter = access_interference(sc, ch, at, cx.active);
  const double qinv_xi = gaussian_qinv(sc.qos.xi);

  std::vector<AcLink> links;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t slot = at.ai(u, k, q);
        if (var_of_slot[slot] < 0) continue;
        AcLink l;
        l.u = u;
        l.k = k;
        l.q = q;
        l.slot = slot;
        l.var = var_of_slot[slot];
        double gain = ch.ac(u, sc.serving(u, q), k, q);
        double tau0 = at.tau[slot];
        double p0 = at.p_ac[slot];
        if (mode == BlockMode::kByShare) {
          l.own_coef = p0 * gain;
          l.z0 = tau0;
        } else {
          l.own_coef = tau0 * gain;
          l.z0 = p0;
        }
        l.e0 = tau0 * p0 * gain;
        l.nfull = sc.sigma1 + inter[slot];
        l.d = access_dc_scalar(l.e0, l.nfull, tau0, sc.w1, sc.phi, qinv_xi);
        l.own_df = l.d.df_dE * l.own_coef;
        // In the share block the lead factor of y is a variable too.
        l.own_dy = l.d.dy_dE * l.own_coef +
                   (mode == BlockMode::kByShare ? l.d.y_lead : 0.0);
        links.push_back(std::move(l));
      }
  }

  // Couple co-subcarrier links of other cells that also carry variables;
  // anything else stays inside the fixed part of the denominator.
  for (AcLink& l : links) {
    int j = sc.serving(l.u, l.q);
    double covered = 0;
    for (const AcLink& m : links) {
      if (m.q != l.q || m.k != l.k || m.u == l.u) continue;
      int f = sc.serving(m.u, m.q);
      if (f == j) continue;
      double h = (l.q == kDl) ? ch.ac(l.u, f, l.k, kDl)
                              : ch.ac(m.u, j, l.k, kUl);
      double coef = (mode == BlockMode::kByShare) ? at.p_ac[m.slot] * h
                                                  : at.tau[m.slot] * h;
      l.xvar.push_back(m.var);
      l.xcoef.push_back(coef);
      l.xz0.push_back(m.z0);
      covered += coef * m.z0;
    }
    l.nfix = std::max(0.0, l.nfull - sc.sigma1 - covered);
  }
  return links;
}

// Concave surrogate of the weighted link rate: exact log of the total
// received power minus first-order models of the denominator log and the
// dispersion penalty.
void add_access_pos(Expr& e, const AcLink& l, double kappa, double sigma) {
  LogTerm lt;
  lt.coef = kappa;
  lt.c0 = sigma + l.nfix;
  lt.arg.add(l.var, l.own_coef);
  for (std::size_t i = 0; i < l.xvar.size(); ++i)
    lt.arg.add(l.xvar[i], l.xcoef[i]);
  e.logs.push_back(std::move(lt));

  e.c0 -= l.d.g;
  e.c0 -= l.d.y;
  e.lin.add(l.var, -l.own_dy);
  e.c0 += l.own_dy * l.z0;
  for (std::size_t i = 0; i < l.xvar.size(); ++i) {
    double dg = l.d.dg_dN * l.xcoef[i];
    double dy = l.d.dy_dN * l.xcoef[i];
    e.lin.add(l.xvar[i], -(dg + dy));
    e.c0 += (dg + dy) * l.xz0[i];
  }
}

// The same rate entering with negative sign: linearize the concave log,
// keep the denominator log exact, linearize the dispersion.
void add_access_neg(Expr& e, const AcLink& l, double kappa, double sigma) {
  e.c0 -= l.d.f;
  e.lin.add(l.var, -l.own_df);
  e.c0 += l.own_df * l.z0;

  LogTerm lt;
  lt.coef = kappa;
  lt.c0 = sigma + l.nfix;
  for (std::size_t i = 0; i < l.xvar.size(); ++i)
    lt.arg.add(l.xvar[i], l.xcoef[i]);
  e.logs.push_back(std::move(lt));

  e.c0 += l.d.y;
  e.lin.add(l.var, l.own_dy);
  e.c0 -= l.own_dy * l.z0;
  for (std::size_t i = 0; i < l.xvar.size(); ++i) {
    double df = l.d.df_dN * l.xcoef[i];
    double dy = l.d.dy_dN * l.xcoef[i];
    e.lin.add(l.xvar[i], dy - df);
    e.c0 += (df - dy) * l.xz0[i];
  }
}

struct FhLink {
  int j = 0, k = 0, q = 0;
  std::size_t slot = 0;
  int var = -1;
  double h = 0, x0 = 0, p0 = 0;
  FronthaulDcScalar d;
};

std::vector<FhLink> build_fronthaul_links(const ElasticContext& cx,
                                          const Allocation& at,
                                          const std::vector<int>& var_of_slot) {
  const Scenario& sc = *cx.sc;
  const double qinv_xi = gaussian_qinv(sc.qos.xi);
  std::vector<FhLink> links;
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t slot = at.fi(j, k, q);
        if (var_of_slot[slot] < 0) continue;
        FhLink l;
        l.j = j;
        l.k = k;
        l.q = q;
        l.slot = slot;
        l.var = var_of_slot[slot];
        l.h = cx.ch->fh(j, k, q);
        l.x0 = at.x[slot];
        l.p0 = at.p_fh[slot];
        l.d = fronthaul_dc_scalar(l.p0, l.h, sc.sigma2, sc.w2, sc.phi, qinv_xi);
        links.push_back(l);
      }
  return links;
}

// Weighted fronthaul rate in the power block, share frozen: exact capacity
// log minus linearized dispersion.
void add_fh_pos_p(Expr& e, const FhLink& l, double kappa, double sigma) {
  LogTerm lt;
  lt.coef = l.x0 * kappa;
  lt.c0 = sigma;
  lt.arg.add(l.var, l.h);
  e.logs.push_back(std::move(lt));
  e.c0 -= l.x0 * kappa * std::log(sigma);

  e.c0 -= l.x0 * l.d.disp;
  e.lin.add(l.var, -l.x0 * l.d.ddisp_dp);
  e.c0 += l.x0 * l.d.ddisp_dp * l.p0;
}

// Negative side: linearized capacity, exact concave dispersion root.
void add_fh_neg_p(Expr& e, const FhLink& l, double c_disp, double sigma) {
  e.c0 -= l.x0 * l.d.cap;
  e.lin.add(l.var, -l.x0 * l.d.dcap_dp);
  e.c0 += l.x0 * l.d.dcap_dp * l.p0;

  if (l.x0 > 0) e.roots.push_back({l.x0 * c_disp, l.var, l.h, sigma});
}

// Per-unit-share fronthaul rate at frozen power (exact in the share block).
double fh_unit_rate(const FhLink& l) { return l.d.cap - l.d.disp; }

// Adds the shared deficit relief sum(rs * alpha) over the given slack
// variables to an elastic constraint.
void add_alpha(Expr& e, const std::vector<int>& avars, double rs) {
  for (int v : avars) e.lin.add(v, rs);
}

// Dynamic range of an expression over the variable box.  Rate constraints
// live in bit/s while the shares and powers are O(1); normalizing them by a
// slice of their own range keeps the multiplier updates conditioned without
// drowning the feasibility tolerance.
double expr_span(const Subproblem& sp, const Expr& e) {
  double s = 0;
  for (std::size_t i = 0; i < e.lin.idx.size(); ++i)
    s += std::abs(e.lin.coef[i]) * (sp.hi[e.lin.idx[i]] - sp.lo[e.lin.idx[i]]);
  for (const LogTerm& lt : e.logs) {
    double top = lt.c0;
    for (std::size_t i = 0; i < lt.arg.idx.size(); ++i)
      top += std::abs(lt.arg.coef[i]) * sp.hi[lt.arg.idx[i]];
    if (lt.c0 > 0 && top > lt.c0)
      s += std::abs(lt.coef) * std::log(top / lt.c0);
  }
  for (const SqrtVTerm& rt : e.roots) s += std::abs(rt.coef);
  return s;
}

// Scale for an elastic rate constraint, computed before the relief terms
// are appended so the slack capacity does not dilute it.
double rate_con_scale(const Subproblem& sp, const Expr& e, double rs) {
  return std::max(rs, 0.01 * expr_span(sp, e));
}

}  // namespace

double c2_sinr_threshold(const Scenario& sc, double relief) {
  QApproxParams qp = QApproxParams::make(sc.omega, sc.w1, sc.phi);
  return q_approx_sinr_threshold(qp, sc.qos.xi + relief);
}

double c6_sinr_threshold(const Scenario& sc, double relief) {
  QApproxParams qp = QApproxParams::make(sc.omega, sc.w2, sc.phi);
  return q_approx_sinr_threshold(qp, sc.qos.xi + relief);
}

ElasticContext ElasticContext::make(const Scenario& sc,
                                    const ChannelRealization& ch,
                                    std::vector<char> active) {
  ElasticContext cx;
  cx.sc = &sc;
  cx.ch = &ch;
  cx.active = std::move(active);

  // Reference thresholds at an even three-way split of the delay budget.
  DelaySplit thirds;
  thirds.d_rrh.assign(sc.n_rrh(), sc.qos.delay_budget_s / 3.0);
  thirds.d_bbu = sc.qos.delay_budget_s / 3.0;
  thirds.d_user.assign(sc.n_users(), sc.qos.delay_budget_s / 3.0);
  RateThresholds t = compute_thresholds(sc, thirds, cx.active);

  double top = t.bbu;
  for (int j = 0; j < sc.n_rrh(); ++j)
    if (t.rrh_used[j]) top = std::max(top, t.rrh[j]);
  for (int u = 0; u < sc.n_users(); ++u)
    if (cx.active[u]) top = std::max(top, t.user[u]);
  for (double r : sc.rsv_rate) top = std::max(top, r);

  cx.rate_scale = std::max(1.0, top);
  cx.alpha0 = cx.rate_scale;
  cx.alpha_cap = 2.0 * cx.rate_scale;

  // Large enough that carrying any deficit always costs more than the whole
  // power budget, small enough that the slack gradients stay within a few
  // orders of the power gradients.
  double budgets = sc.p_bbu_dl + sc.n_rrh() * (sc.p_rrh_dl + sc.p_rrh_ul);
  for (int u = 0; u < sc.n_users(); ++u)
    if (cx.active[u]) budgets += sc.p_user_ul;
  cx.big_m = 1e2 * budgets;
  return cx;
}

BlockProblem assemble_subcarrier_subproblem(const ElasticContext& cx,
                                            const Allocation& at) {
  const Scenario& sc = *cx.sc;
  const double kappa1 = sc.w1 / kLn2;
  const double rs = cx.rate_scale;
  BlockProblem bp;
  Subproblem& sp = bp.sp;

  // Variable layout: all access shares of active users, all fronthaul
  // shares, then the normalized deficit slacks.
  std::vector<int> tvar(at.tau.size(), -1), xvar(at.x.size(), -1);
  std::vector<int> avar(at.alpha.size(), -1);
  auto push = [&](int kind, std::size_t off, double lo, double hi, double z0) {
    bp.slots.push_back({kind, off});
    sp.lo.push_back(lo);
    sp.hi.push_back(hi);
    bp.z0.push_back(z0);
    return sp.n++;
  };
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = at.ai(u, k, q);
        tvar[s] = push(0, s, 0.0, 1.0, at.tau[s]);
      }
  }
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = at.fi(j, k, q);
        xvar[s] = push(1, s, 0.0, 1.0, at.x[s]);
      }
  std::vector<int> all_alpha;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k) {
      std::size_t s = at.wi(u, k);
      avar[s] = push(4, s, 0.0, cx.alpha_cap / rs,
                     std::clamp(at.alpha[s] / rs, 0.0, cx.alpha_cap / rs));
      all_alpha.push_back(avar[s]);
    }
  }

  std::vector<AcLink> ac = build_access_links(cx, at, BlockMode::kByShare, tvar);
  std::vector<FhLink> fh = build_fronthaul_links(cx, at, xvar);

  // Reliability as boxes: with the denominator frozen the minimum-SINR
  // condition is share-independent, so links below threshold are pinned off.
  double t2 = c2_sinr_threshold(sc, 0.0);
  if (t2 > 0)
    for (const AcLink& l : ac)
      if (l.own_coef <= t2 * l.nfull) sp.hi[l.var] = 0.0;
  double t6 = c6_sinr_threshold(sc, 0.0);
  if (t6 > 0)
    for (const FhLink& l : fh)
      if (l.p0 * l.h <= t6 * sc.sigma2) sp.hi[l.var] = 0.0;

  // Objective: transmit energy at frozen powers plus the deficit penalty.
  for (const AcLink& l : ac) sp.obj.lin.add(l.var, at.p_ac[l.slot]);
  for (const FhLink& l : fh) sp.obj.lin.add(l.var, l.p0);
  for (int v : all_alpha) sp.obj.lin.add(v, cx.big_m);

  auto add_con = [&](Expr e, double scale) {
    sp.cons.push_back(std::move(e));
    sp.scale.push_back(scale);
  };

  // Access exclusivity per (RRH, subcarrier, direction).
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        Expr e;
        e.c0 = 1.0;
        bool any = false;
        for (int u = 0; u < sc.n_users(); ++u) {
          if (!cx.active[u] || sc.serving(u, q) != j) continue;
          e.lin.add(tvar[at.ai(u, k, q)], -1.0);
          any = true;
        }
        if (any) add_con(std::move(e), 1.0);
      }

  // Fronthaul exclusivity per (subcarrier, direction).
  if (!cx.drop_extra_budgets)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        Expr e;
        e.c0 = 1.0;
        for (int j = 0; j < sc.n_rrh(); ++j)
          e.lin.add(xvar[at.fi(j, k, q)], -1.0);
        add_con(std::move(e), 1.0);
      }

  // Power budgets, linear in the shares at frozen powers.
  for (int j = 0; j < sc.n_rrh(); ++j) {
    Expr e;
    e.c0 = sc.p_rrh_dl;
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u] || sc.users[u].serve_dl != j) continue;
      for (int k = 0; k < sc.k1; ++k) {
        std::size_t s = at.ai(u, k, kDl);
        e.lin.add(tvar[s], -at.p_ac[s]);
      }
    }
    add_con(std::move(e), sc.p_rrh_dl);
  }
  if (!cx.drop_extra_budgets) {
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u]) continue;
      Expr e;
      e.c0 = sc.p_user_ul;
      for (int k = 0; k < sc.k1; ++k) {
        std::size_t s = at.ai(u, k, kUl);
        e.lin.add(tvar[s], -at.p_ac[s]);
      }
      add_con(std::move(e), sc.p_user_ul);
    }
    for (int j = 0; j < sc.n_rrh(); ++j) {
      Expr e;
      e.c0 = sc.p_rrh_ul;
      for (int k = 0; k < sc.k2; ++k) {
        std::size_t s = at.fi(j, k, kUl);
        e.lin.add(xvar[s], -at.p_fh[s]);
      }
      add_con(std::move(e), sc.p_rrh_ul);
    }
    {
      Expr e;
      e.c0 = sc.p_bbu_dl;
      for (int j = 0; j < sc.n_rrh(); ++j)
        for (int k = 0; k < sc.k2; ++k) {
          std::size_t s = at.fi(j, k, kDl);
          e.lin.add(xvar[s], -at.p_fh[s]);
        }
      add_con(std::move(e), sc.p_bbu_dl);
    }
  }

  RateThresholds thr = compute_thresholds(sc, at.delay, cx.active);

  // Queue rate floors, flow conservation and slice reservations, all with
  // the shared deficit relief.
  for (int j = 0; j < sc.n_rrh(); ++j) {
    if (!thr.rrh_used[j]) continue;
    Expr e;
    e.c0 = -thr.rrh[j];
    std::vector<int> relief;
    for (const AcLink& l : ac)
      if (l.q == kUl && sc.users[l.u].serve_ul == j)
        add_access_pos(e, l, kappa1, sc.sigma1);
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u] || sc.users[u].serve_ul != j) continue;
      for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
    }
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, relief, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;
    e.c0 = -thr.bbu;
    for (const FhLink& l : fh)
      if (l.q == kUl) e.lin.add(l.var, fh_unit_rate(l));
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    Expr e;
    e.c0 = -thr.user[u];
    std::vector<int> relief;
    for (const AcLink& l : ac)
      if (l.u == u && l.q == kDl) add_access_pos(e, l, kappa1, sc.sigma1);
    for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, relief, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;  // fronthaul must carry what access collects
    for (const FhLink& l : fh)
      if (l.q == kUl) e.lin.add(l.var, fh_unit_rate(l));
    for (const AcLink& l : ac)
      if (l.q == kUl) add_access_neg(e, l, kappa1, sc.sigma1);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;  // access must drain what fronthaul delivers
    for (const AcLink& l : ac)
      if (l.q == kDl) add_access_pos(e, l, kappa1, sc.sigma1);
    for (const FhLink& l : fh)
      if (l.q == kDl) e.lin.add(l.var, -fh_unit_rate(l));
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  for (int s = 0; s < sc.n_slices; ++s)
    for (int q = 0; q < kDirs; ++q) {
      if (sc.rsv(s, q) <= 0) continue;
      bool any = false;
      for (int u = 0; u < sc.n_users() && !any; ++u)
        any = cx.active[u] && sc.users[u].slice == s;
      if (!any) continue;
      Expr e;
      e.c0 = -sc.rsv(s, q);
      std::vector<int> relief;
      for (const AcLink& l : ac)
        if (l.q == q && sc.users[l.u].slice == s)
          add_access_pos(e, l, kappa1, sc.sigma1);
      for (int u = 0; u < sc.n_users(); ++u) {
        if (!cx.active[u] || sc.users[u].slice != s) continue;
        for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
      }
      double cscale = rate_con_scale(sp, e, rs);
      add_alpha(e, relief, rs);
      add_con(std::move(e), cscale);
    }

  return bp;
}

BlockProblem assemble_power_subproblem(const ElasticContext& cx,
                                       const Allocation& at) {
  const Scenario& sc = *cx.sc;
  const double kappa1 = sc.w1 / kLn2;
  const double kappa2 = sc.w2 / kLn2;
  const double c_disp2 =
      std::sqrt(sc.w2 / sc.phi) * gaussian_qinv(sc.qos.xi) / kLn2;
  const double rs = cx.rate_scale;
  const double boxf = cx.power_box_factor;
  // The repair chain may stop while marginally short in the solver's scaled
  // units; a small interior margin on every floor (and shave on every
  // budget) keeps such stops strictly feasible for the exact system, at
  // about a one-percent power premium.
  constexpr double kPad = 1e-2;
  constexpr double kShave = 1e-3;
  BlockProblem bp;
  Subproblem& sp = bp.sp;

  std::vector<int> pvar(at.p_ac.size(), -1), pfvar(at.p_fh.size(), -1);
  std::vector<int> avar(at.alpha.size(), -1);
  auto push = [&](int kind, std::size_t off, double lo, double hi, double z0) {
    bp.slots.push_back({kind, off});
    sp.lo.push_back(lo);
    sp.hi.push_back(hi);
    bp.z0.push_back(z0);
    return sp.n++;
  };

  // Only links that currently hold a share carry power variables.
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = at.ai(u, k, q);
        if (at.tau[s] <= kAssignEps) continue;
        double cap = boxf * (q == kUl ? sc.p_user_ul : sc.p_rrh_dl);
        pvar[s] = push(2, s, 0.0, cap, std::min(at.p_ac[s], cap));
      }
  }
  double t6 = c6_sinr_threshold(sc, 0.0) * (1.0 + kPad);
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = at.fi(j, k, q);
        if (at.x[s] <= kAssignEps) continue;
        double cap = boxf * (q == kUl ? sc.p_rrh_ul : sc.p_bbu_dl);
        // Fronthaul reliability is a one-variable bound: box it directly.
        double lo = t6 > 0 ? std::min(t6 * sc.sigma2 / cx.ch->fh(j, k, q), cap)
                           : 0.0;
        pfvar[s] = push(3, s, lo, cap, std::clamp(at.p_fh[s], lo, cap));
      }
  std::vector<int> all_alpha;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k) {
      std::size_t s = at.wi(u, k);
      avar[s] = push(4, s, 0.0, cx.alpha_cap / rs,
                     std::clamp(at.alpha[s] / rs, 0.0, cx.alpha_cap / rs));
      all_alpha.push_back(avar[s]);
    }
  }

  std::vector<AcLink> ac = build_access_links(cx, at, BlockMode::kByPower, pvar);
  std::vector<FhLink> fh = build_fronthaul_links(cx, at, pfvar);

  for (const AcLink& l : ac) sp.obj.lin.add(l.var, at.tau[l.slot]);
  for (const FhLink& l : fh) sp.obj.lin.add(l.var, l.x0);
  for (int v : all_alpha) sp.obj.lin.add(v, cx.big_m);

  auto add_con = [&](Expr e, double scale) {
    sp.cons.push_back(std::move(e));
    sp.scale.push_back(scale);
  };

  // Access reliability, exact and linear in the powers: the effective own
  // signal must clear the minimum SINR against noise plus interference.
  double t2 = c2_sinr_threshold(sc, 0.0) * (1.0 + kPad);
  if (t2 > 0)
    for (const AcLink& l : ac) {
      Expr e;
      e.c0 = -t2 * (sc.sigma1 + l.nfix);
      e.lin.add(l.var, l.own_coef);
      for (std::size_t i = 0; i < l.xvar.size(); ++i)
        e.lin.add(l.xvar[i], -t2 * l.xcoef[i]);
      add_con(std::move(e), std::max({t2 * l.nfull, l.e0, 1e-30}));
    }

  // Power budgets at frozen shares.
  for (int j = 0; j < sc.n_rrh(); ++j) {
    Expr e;
    e.c0 = sc.p_rrh_dl * (1.0 - kShave);
    bool any = false;
    for (const AcLink& l : ac)
      if (l.q == kDl && sc.users[l.u].serve_dl == j) {
        e.lin.add(l.var, -at.tau[l.slot]);
        any = true;
      }
    if (any) add_con(std::move(e), sc.p_rrh_dl);
  }
  if (!cx.drop_extra_budgets) {
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u]) continue;
      Expr e;
      e.c0 = sc.p_user_ul * (1.0 - kShave);
      bool any = false;
      for (const AcLink& l : ac)
        if (l.u == u && l.q == kUl) {
          e.lin.add(l.var, -at.tau[l.slot]);
          any = true;
        }
      if (any) add_con(std::move(e), sc.p_user_ul);
    }
    for (int j = 0; j < sc.n_rrh(); ++j) {
      Expr e;
      e.c0 = sc.p_rrh_ul * (1.0 - kShave);
      bool any = false;
      for (const FhLink& l : fh)
        if (l.q == kUl && l.j == j) {
          e.lin.add(l.var, -l.x0);
          any = true;
        }
      if (any) add_con(std::move(e), sc.p_rrh_ul);
    }
    {
      Expr e;
      e.c0 = sc.p_bbu_dl * (1.0 - kShave);
      bool any = false;
      for (const FhLink& l : fh)
        if (l.q == kDl) {
          e.lin.add(l.var, -l.x0);
          any = true;
        }
      if (any) add_con(std::move(e), sc.p_bbu_dl);
    }
  }

  RateThresholds thr = compute_thresholds(sc, at.delay, cx.active);
  RateReport cur = aggregate_rates(sc, *cx.ch, at, cx.active);

  for (int j = 0; j < sc.n_rrh(); ++j) {
    if (!thr.rrh_used[j]) continue;
    Expr e;
    e.c0 = -thr.rrh[j] * (1.0 + kPad);
    std::vector<int> relief;
    for (const AcLink& l : ac)
      if (l.q == kUl && sc.users[l.u].serve_ul == j)
        add_access_pos(e, l, kappa1, sc.sigma1);
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u] || sc.users[u].serve_ul != j) continue;
      for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
    }
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, relief, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;
    e.c0 = -thr.bbu * (1.0 + kPad);
    for (const FhLink& l : fh)
      if (l.q == kUl) add_fh_pos_p(e, l, kappa2, sc.sigma2);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    Expr e;
    e.c0 = -thr.user[u] * (1.0 + kPad);
    std::vector<int> relief;
    for (const AcLink& l : ac)
      if (l.u == u && l.q == kDl) add_access_pos(e, l, kappa1, sc.sigma1);
    for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, relief, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;
    e.c0 = -kPad * std::max(thr.bbu, cur.ac_ul);
    for (const FhLink& l : fh)
      if (l.q == kUl) add_fh_pos_p(e, l, kappa2, sc.sigma2);
    for (const AcLink& l : ac)
      if (l.q == kUl) add_access_neg(e, l, kappa1, sc.sigma1);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  {
    Expr e;
    e.c0 = -kPad * cur.fh_dl;
    for (const AcLink& l : ac)
      if (l.q == kDl) add_access_pos(e, l, kappa1, sc.sigma1);
    for (const FhLink& l : fh)
      if (l.q == kDl) add_fh_neg_p(e, l, c_disp2, sc.sigma2);
    double cscale = rate_con_scale(sp, e, rs);
    add_alpha(e, all_alpha, rs);
    add_con(std::move(e), cscale);
  }
  for (int s = 0; s < sc.n_slices; ++s)
    for (int q = 0; q < kDirs; ++q) {
      if (sc.rsv(s, q) <= 0) continue;
      bool any = false;
      for (int u = 0; u < sc.n_users() && !any; ++u)
        any = cx.active[u] && sc.users[u].slice == s;
      if (!any) continue;
      Expr e;
      e.c0 = -sc.rsv(s, q) * (1.0 + kPad);
      std::vector<int> relief;
      for (const AcLink& l : ac)
        if (l.q == q && sc.users[l.u].slice == s)
          add_access_pos(e, l, kappa1, sc.sigma1);
      for (int u = 0; u < sc.n_users(); ++u) {
        if (!cx.active[u] || sc.users[u].slice != s) continue;
        for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[at.wi(u, k)]);
      }
      double cscale = rate_con_scale(sp, e, rs);
      add_alpha(e, relief, rs);
      add_con(std::move(e), cscale);
    }

  return bp;
}

void apply_solution(const ElasticContext& cx, const BlockProblem& bp,
                    const std::vector<double>& z, Allocation& al) {
  for (std::size_t i = 0; i < bp.slots.size(); ++i) {
    double v = z[i];
    switch (bp.slots[i].kind) {
      case 0:
        al.tau[bp.slots[i].offset] = std::clamp(v, 0.0, 1.0);
        break;
      case 1:
        al.x[bp.slots[i].offset] = std::clamp(v, 0.0, 1.0);
        break;
      case 2:
        al.p_ac[bp.slots[i].offset] = std::max(0.0, v);
        break;
      case 3:
        al.p_fh[bp.slots[i].offset] = std::max(0.0, v);
        break;
      default:
        al.alpha[bp.slots[i].offset] = std::max(0.0, v) * cx.rate_scale;
        break;
    }
  }
}

double elastic_objective(const ElasticContext& cx, const Allocation& al) {
  double v = total_power(*cx.sc, al, cx.active);
  for (int u = 0; u < cx.sc->n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < cx.sc->k1; ++k)
      v += cx.big_m * al.alpha[al.wi(u, k)] / cx.rate_scale;
  }
  return v;
}

bool solve_delay_lp(const ElasticContext& cx, Allocation& al) {
  const Scenario& sc = *cx.sc;
  const auto& q = sc.qos;
  const double dmax = q.delay_budget_s;
  RateReport rep = aggregate_rates(sc, *cx.ch, al, cx.active);

  // Queue service rates with the deficit relief applied.
  std::vector<double> lam_rrh(sc.n_rrh(), 0.0);
  std::vector<char> used(sc.n_rrh(), 0);
  double lam_bbu = rep.fh_ul;
  std::vector<double> lam_user(sc.n_users(), 0.0);
  bool any_user = false;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    any_user = true;
    int j = sc.users[u].serve_ul;
    used[j] = 1;
    lam_user[u] = rep.user_dl[u];
    for (int k = 0; k < sc.k1; ++k) {
      double a = al.alpha[al.wi(u, k)];
      lam_rrh[j] += a;
      lam_bbu += a;
      lam_user[u] += a;
    }
  }
  for (int j = 0; j < sc.n_rrh(); ++j) lam_rrh[j] += rep.rrh_ul[j];

  auto reset_idle = [&](DelaySplit& d) {
    for (int j = 0; j < sc.n_rrh(); ++j)
      if (!used[j]) d.d_rrh[j] = dmax / 3.0;
    for (int u = 0; u < sc.n_users(); ++u)
      if (!cx.active[u]) d.d_user[u] = dmax / 3.0;
  };

  if (!any_user) {
    al.delay.d_rrh.assign(sc.n_rrh(), dmax / 3.0);
    al.delay.d_bbu = dmax / 3.0;
    al.delay.d_user.assign(sc.n_users(), dmax / 3.0);
    return true;
  }

  // Rate floors turn into per-queue deadline lower bounds.
  std::vector<double> lmin_rrh(sc.n_rrh(), 0.0), lmin_user(sc.n_users(), 0.0);
  for (int j = 0; j < sc.n_rrh(); ++j) {
    if (!used[j]) continue;
    if (lam_rrh[j] <= 0) return false;
    lmin_rrh[j] = std::log(1.0 / q.delta_rrh) / (std::expm1(q.theta_rrh) * lam_rrh[j]);
  }
  if (lam_bbu <= 0) return false;
  double lmin_bbu = std::log(1.0 / q.delta_bbu) / (std::expm1(q.theta_bbu) * lam_bbu);
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    if (lam_user[u] <= 0) return false;
    lmin_user[u] =
        std::log(1.0 / q.delta_user) / (std::expm1(q.theta_user) * lam_user[u]);
  }

  // Maximin slack over the queue bounds and the chain budgets.  Every
  // deadline gets the common slack t; the tightest chain then keeps slack t
  // as well, which makes t = min over chains of (budget - bounds)/4 optimal.
  double t = 1e300;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    double room = dmax - lmin_rrh[sc.users[u].serve_ul] - lmin_bbu - lmin_user[u];
    t = std::min(t, room / 4.0);
  }
  if (t < 0) return false;

  for (int j = 0; j < sc.n_rrh(); ++j)
    if (used[j]) al.delay.d_rrh[j] = lmin_rrh[j] + t;
  al.delay.d_bbu = lmin_bbu + t;
  for (int u = 0; u < sc.n_users(); ++u)
    if (cx.active[u]) al.delay.d_user[u] = lmin_user[u] + t;
  reset_idle(al.delay);
  return true;
}

double solve_alpha_lp(const ElasticContext& cx, Allocation& al,
                      const SolveOptions& opt) {
  const Scenario& sc = *cx.sc;
  const double rs = cx.rate_scale;
  RateReport rep = aggregate_rates(sc, *cx.ch, al, cx.active);
  RateThresholds thr = compute_thresholds(sc, al.delay, cx.active);

  Subproblem sp;
  std::vector<int> avar(al.alpha.size(), -1);
  std::vector<std::size_t> slot_of;
  std::vector<int> all_alpha;
  std::vector<double> z;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k) {
      std::size_t s = al.wi(u, k);
      avar[s] = sp.n++;
      slot_of.push_back(s);
      all_alpha.push_back(avar[s]);
      sp.lo.push_back(0.0);
      sp.hi.push_back(cx.alpha_cap / rs);
      z.push_back(std::clamp(al.alpha[s] / rs, 0.0, cx.alpha_cap / rs));
      sp.obj.lin.add(avar[s], 1.0);
    }
  }
  if (sp.n == 0) return 0.0;

  auto add_need = [&](double need, const std::vector<int>& relief) {
    if (need <= 0) return;
    Expr e;
    e.c0 = -need;
    add_alpha(e, relief, rs);
    sp.cons.push_back(std::move(e));
    sp.scale.push_back(rs);
  };

  for (int j = 0; j < sc.n_rrh(); ++j) {
    if (!thr.rrh_used[j]) continue;
    std::vector<int> relief;
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u] || sc.users[u].serve_ul != j) continue;
      for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[al.wi(u, k)]);
    }
    add_need(thr.rrh[j] - rep.rrh_ul[j], relief);
  }
  add_need(thr.bbu - rep.fh_ul, all_alpha);
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    std::vector<int> relief;
    for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[al.wi(u, k)]);
    add_need(thr.user[u] - rep.user_dl[u], relief);
  }
  add_need(rep.ac_ul - rep.fh_ul, all_alpha);
  add_need(rep.fh_dl - rep.ac_dl, all_alpha);
  for (int s = 0; s < sc.n_slices; ++s)
    for (int q = 0; q < kDirs; ++q) {
      if (sc.rsv(s, q) <= 0) continue;
      std::vector<int> relief;
      for (int u = 0; u < sc.n_users(); ++u) {
        if (!cx.active[u] || sc.users[u].slice != s) continue;
        for (int k = 0; k < sc.k1; ++k) relief.push_back(avar[al.wi(u, k)]);
      }
      if (!relief.empty()) add_need(sc.rsv(s, q) - rep.slice_q[s * kDirs + q], relief);
    }

  solve_convex(sp, z, opt);

  double worst = 0;
  for (std::size_t i = 0; i < slot_of.size(); ++i) {
    double a = std::max(0.0, z[i]) * rs;
    al.alpha[slot_of[i]] = a;
    worst = std::max(worst, a);
  }
  return worst;
}

void round_timesharing(const ElasticContext& cx, Allocation& al,
                       double threshold) {
  const Scenario& sc = *cx.sc;

  // Winner per access slot by largest share.
  std::vector<int> win(static_cast<std::size_t>(sc.n_rrh()) * sc.k1 * kDirs,
                       -1);
  auto wslot = [&](int j, int k, int q) {
    return (static_cast<std::size_t>(j) * sc.k1 + k) * kDirs + q;
  };
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        double best = threshold;
        for (int u = 0; u < sc.n_users(); ++u) {
          if (!cx.active[u] || sc.serving(u, q) != j) continue;
          double t = al.tau[al.ai(u, k, q)];
          if (t > best) {
            best = t;
            win[wslot(j, k, q)] = u;
          }
        }
      }

  // Hard assignment can starve queues the shared solution covered: the
  // per-user downlink floor needs every user to hold a slot, and the
  // per-cell uplink floor needs every serving cell to keep one.  Hand the
  // starved party its highest-share slot, displacing only winners that keep
  // another slot.
  std::vector<int> ndl(sc.n_users(), 0);
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k1; ++k) {
      int w = win[wslot(j, k, kDl)];
      if (w >= 0) ++ndl[w];
    }
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u] || ndl[u] > 0) continue;
    int j = sc.users[u].serve_dl;
    std::vector<int> order(sc.k1);
    for (int k = 0; k < sc.k1; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return al.tau[al.ai(u, a, kDl)] > al.tau[al.ai(u, b, kDl)];
    });
    for (int k : order) {
      int& w = win[wslot(j, k, kDl)];
      if (w >= 0 && ndl[w] < 2) continue;
      if (w >= 0) --ndl[w];
      w = u;
      ++ndl[u];
      break;
    }
  }
  for (int j = 0; j < sc.n_rrh(); ++j) {
    bool has_user = false, has_slot = false;
    for (int u = 0; u < sc.n_users(); ++u)
      has_user = has_user || (cx.active[u] && sc.users[u].serve_ul == j);
    for (int k = 0; k < sc.k1; ++k)
      has_slot = has_slot || win[wslot(j, k, kUl)] >= 0;
    if (!has_user || has_slot) continue;
    int bu = -1, bk = 0;
    double best = -1;
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!cx.active[u] || sc.users[u].serve_ul != j) continue;
      for (int k = 0; k < sc.k1; ++k) {
        double t = al.tau[al.ai(u, k, kUl)];
        if (t > best) {
          best = t;
          bu = u;
          bk = k;
        }
      }
    }
    if (bu >= 0) win[wslot(j, bk, kUl)] = bu;
  }

  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        int w = win[wslot(j, k, q)];
        for (int u = 0; u < sc.n_users(); ++u) {
          if (!cx.active[u] || sc.serving(u, q) != j) continue;
          std::size_t s = al.ai(u, k, q);
          al.tau[s] = (u == w) ? 1.0 : 0.0;
          if (u != w) al.p_ac[s] = 0.0;
        }
      }

  for (int k = 0; k < sc.k2; ++k)
    for (int q = 0; q < kDirs; ++q) {
      int fwin = -1;
      double best = threshold;
      for (int j = 0; j < sc.n_rrh(); ++j) {
        double x = al.x[al.fi(j, k, q)];
        if (x > best) {
          best = x;
          fwin = j;
        }
      }
      for (int j = 0; j < sc.n_rrh(); ++j) {
        std::size_t s = al.fi(j, k, q);
        al.x[s] = (j == fwin) ? 1.0 : 0.0;
        if (j != fwin) al.p_fh[s] = 0.0;
      }
    }
}

bool prune_assignment(const ElasticContext& cx, Allocation& al) {
  const Scenario& sc = *cx.sc;
  const ChannelRealization& ch = *cx.ch;

  // Every assigned slot pays at least the reliability SINR floor whether the
  // queues need its rate or not; surplus slots are pure cost.  Try dropping
  // them, most expensive first, keeping each removal only when the exact
  // constraint system stays satisfied.
  struct Cand {
    double p;
    int fh;  // 0 = access, 1 = fronthaul
    std::size_t slot;
    int k;
    int q;
  };
  std::vector<Cand> cands;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = al.ai(u, k, q);
        if (al.tau[s] > 0.5) cands.push_back({al.p_ac[s], 0, s, k, q});
      }
  }
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t s = al.fi(j, k, q);
        if (al.x[s] > 0.5) cands.push_back({al.p_fh[s], 1, s, k, q});
      }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.p > b.p; });

  bool changed = false;
  // Access (subcarrier, direction) pairs whose single drop failed on the
  // flow coupling; candidates for a whole-group drop below.
  std::vector<char> flow_blocked(static_cast<std::size_t>(sc.k1) * kDirs, 0);
  for (const Cand& c : cands) {
    double tau_save, p_save;
    if (c.fh) {
      tau_save = al.x[c.slot];
      p_save = al.p_fh[c.slot];
      al.x[c.slot] = 0;
      al.p_fh[c.slot] = 0;
    } else {
      tau_save = al.tau[c.slot];
      p_save = al.p_ac[c.slot];
      al.tau[c.slot] = 0;
      al.p_ac[c.slot] = 0;
    }
    ConstraintReport rep = evaluate_constraints(sc, ch, al, cx.active);
    if (std::getenv("CRAN_PRUNE_TRACE")) {
      int wf = -1;
      for (int f = 0; f < 15; ++f)
        if (rep.family[f] == rep.worst) { wf = f; break; }
      std::fprintf(stderr, "[prune] %s slot=%zu p=%.4f -> worst=%.3e C%d %s\n",
                   c.fh ? "fh" : "ac", c.slot, c.p, rep.worst, wf + 1,
                   rep.worst >= -1e-6 ? "DROP" : "keep");
    }
    if (rep.worst >= -1e-6) {
      changed = true;
      continue;
    }
    if (c.fh) {
      al.x[c.slot] = tau_save;
      al.p_fh[c.slot] = p_save;
    } else {
      al.tau[c.slot] = tau_save;
      al.p_ac[c.slot] = p_save;
      if (rep.family[12] < -1e-6 || rep.family[13] < -1e-6)
        flow_blocked[static_cast<std::size_t>(c.k) * kDirs + c.q] = 1;
    }
  }

  // Removing one transmitter relieves its co-channel cells, and the extra
  // delivered volume can outgrow the fronthaul's; such slots wedge each
  // other in place one by one.  Removing the whole co-channel group takes
  // the volume out with no interference left behind, so retry those drops
  // group-wise.
  for (int k = 0; k < sc.k1; ++k)
    for (int q = 0; q < kDirs; ++q) {
      if (!flow_blocked[static_cast<std::size_t>(k) * kDirs + q]) continue;
      std::vector<std::pair<std::size_t, std::pair<double, double>>> saved;
      for (int u = 0; u < sc.n_users(); ++u) {
        if (!cx.active[u]) continue;
        std::size_t s = al.ai(u, k, q);
        if (al.tau[s] <= 0.5) continue;
        saved.push_back({s, {al.tau[s], al.p_ac[s]}});
        al.tau[s] = 0;
        al.p_ac[s] = 0;
      }
      if (saved.size() < 2) {
        for (const auto& sv : saved) {
          al.tau[sv.first] = sv.second.first;
          al.p_ac[sv.first] = sv.second.second;
        }
        continue;
      }
      ConstraintReport rep = evaluate_constraints(sc, ch, al, cx.active);
      if (std::getenv("CRAN_PRUNE_TRACE"))
        std::fprintf(stderr, "[prune] group k=%d q=%d n=%zu -> worst=%.3e %s\n",
                     k, q, saved.size(), rep.worst,
                     rep.worst >= -1e-6 ? "DROP" : "keep");
      if (rep.worst >= -1e-6) {
        changed = true;
        continue;
      }
      for (const auto& sv : saved) {
        al.tau[sv.first] = sv.second.first;
        al.p_ac[sv.first] = sv.second.second;
      }
    }
  return changed;
}

bool escalate_assignment(const ElasticContext& cx, Allocation& al) {
  const Scenario& sc = *cx.sc;
  const ChannelRealization& ch = *cx.ch;
  RateReport rates = aggregate_rates(sc, ch, al, cx.active);
  RateThresholds thr = compute_thresholds(sc, al.delay, cx.active);

  // The deepest uncovered rate floor picks the receivers: a starved user
  // (per-user downlink floor), the uplink pool of a cell, or a slice whose
  // reservation fell short.
  double worst = 1e-7;
  std::vector<char> recv(sc.n_users(), 0);
  int dir = -1;
  bool found = false;
  auto consider = [&](double rel, int d, auto member) {
    if (rel <= worst) return;
    worst = rel;
    dir = d;
    found = true;
    for (int u = 0; u < sc.n_users(); ++u)
      recv[u] = cx.active[u] && member(u) ? 1 : 0;
  };
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    consider((thr.user[u] - rates.user_dl[u]) / thr.user[u], kDl,
             [&](int v) { return v == u; });
  }
  for (int j = 0; j < sc.n_rrh(); ++j) {
    if (!thr.rrh_used[j]) continue;
    consider((thr.rrh[j] - rates.rrh_ul[j]) / thr.rrh[j], kUl,
             [&](int v) { return sc.users[v].serve_ul == j; });
  }
  for (int s = 0; s < sc.n_slices; ++s)
    for (int q = 0; q < kDirs; ++q) {
      if (sc.rsv(s, q) <= 0) continue;
      bool any = false;
      for (int u = 0; u < sc.n_users() && !any; ++u)
        any = cx.active[u] && sc.users[u].slice == s;
      if (!any) continue;
      consider((sc.rsv(s, q) - rates.slice_q[s * kDirs + q]) / sc.rsv(s, q), q,
               [&](int v) { return sc.users[v].slice == s; });
    }
  if (!found) return false;

  // Slot ownership and per-direction holdings at the hard point.
  auto wslot = [&](int j, int k, int q) {
    return (static_cast<std::size_t>(j) * sc.k1 + k) * kDirs + q;
  };
  std::vector<int> win(static_cast<std::size_t>(sc.n_rrh()) * sc.k1 * kDirs,
                       -1);
  std::vector<std::array<int, 2>> cnt(sc.n_users(), {0, 0});
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!cx.active[u]) continue;
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q)
        if (al.tau[al.ai(u, k, q)] > 0.5) {
          win[wslot(sc.serving(u, q), k, q)] = u;
          ++cnt[u][q];
        }
  }

  // Best legal grant by channel gain.  A donor must keep a slot in this
  // direction and must not be starving itself.
  int bu = -1, bk = -1, bw = -1;
  double bg = -1;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!recv[u]) continue;
    int j = sc.serving(u, dir);
    for (int k = 0; k < sc.k1; ++k) {
      int w = win[wslot(j, k, dir)];
      if (w == u) continue;
      if (w >= 0 && (recv[w] || cnt[w][dir] < 2)) continue;
      double g = ch.ac(u, j, k, dir);
      if (g > bg) {
        bg = g;
        bu = u;
        bk = k;
        bw = w;
      }
    }
  }
  if (bu < 0) return false;

  double seed = 0;
  if (bw >= 0) {
    std::size_t s = al.ai(bw, bk, dir);
    seed = al.p_ac[s];
    al.tau[s] = 0;
    al.p_ac[s] = 0;
  }
  if (dir == kUl) {
    double used = 0;
    for (int k = 0; k < sc.k1; ++k)
      used += al.tau[al.ai(bu, k, kUl)] * al.p_ac[al.ai(bu, k, kUl)];
    double room = std::max(sc.p_user_ul - used, sc.p_user_ul / (10.0 * sc.k1));
    seed = std::min(seed > 0 ? seed : sc.p_user_ul / sc.k1, room);
  } else if (seed <= 0) {
    seed = sc.p_rrh_dl / sc.k1;
  }
  std::size_t s = al.ai(bu, bk, dir);
  al.tau[s] = 1.0;
  al.p_ac[s] = seed;
  return true;
}

ConstraintReport evaluate_constraints(const Scenario& sc,
                                      const ChannelRealization& ch,
                                      const Allocation& al,
                                      const std::vector<char>& active) {
  ConstraintReport rep;
  rep.family.fill(1.0);
  auto upd = [&](int fam, double rel) {
    rep.family[fam] = std::min(rep.family[fam], rel);
  };

  RateReport rates = aggregate_rates(sc, ch, al, active);
  BudgetReport bud = power_budget_check(sc, al, active);

  // Exclusivity.
  for (int j = 0; j < sc.n_rrh(); ++j)
    for (int k = 0; k < sc.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        double sum = 0;
        for (int u = 0; u < sc.n_users(); ++u)
          if (active[u] && sc.serving(u, q) == j) sum += al.tau[al.ai(u, k, q)];
        upd(0, 1.0 - sum);
      }
  for (int k = 0; k < sc.k2; ++k)
    for (int q = 0; q < kDirs; ++q) {
      double sum = 0;
      for (int j = 0; j < sc.n_rrh(); ++j) sum += al.x[al.fi(j, k, q)];
      upd(4, 1.0 - sum);
    }

  // Reliability thresholds from the piecewise error model.
  double t2 = c2_sinr_threshold(sc, 0.0);
  if (t2 > 0)
    for (int u = 0; u < sc.n_users(); ++u) {
      if (!active[u]) continue;
      for (int k = 0; k < sc.k1; ++k)
        for (int q = 0; q < kDirs; ++q) {
          std::size_t i = al.ai(u, k, q);
          if (al.tau[i] <= kAssignEps) continue;
          double g = sinr_access(al.tau[i] * al.p_ac[i],
                                 ch.ac(u, sc.serving(u, q), k, q), sc.sigma1,
                                 rates.i_ac[i]);
          upd(1, (g - t2) / t2);
        }
    }
  double t6 = c6_sinr_threshold(sc, 0.0);
  if (t6 > 0)
    for (int j = 0; j < sc.n_rrh(); ++j)
      for (int k = 0; k < sc.k2; ++k)
        for (int q = 0; q < kDirs; ++q) {
          std::size_t i = al.fi(j, k, q);
          if (al.x[i] <= kAssignEps) continue;
          double g = al.p_fh[i] * ch.fh(j, k, q) / sc.sigma2;
          upd(5, (g - t6) / t6);
        }

  // Power budgets.
  for (int j = 0; j < sc.n_rrh(); ++j) {
    upd(2, bud.rrh_dl[j] / sc.p_rrh_dl);
    upd(6, bud.rrh_ul[j] / sc.p_rrh_ul);
  }
  for (int u = 0; u < sc.n_users(); ++u)
    if (active[u]) upd(3, bud.user_ul[u] / sc.p_user_ul);
  upd(7, bud.bbu_dl / sc.p_bbu_dl);

  // Delay chain and queue rate floors.
  const auto& q = sc.qos;
  for (int u = 0; u < sc.n_users(); ++u) {
    if (!active[u]) continue;
    double used = al.delay.d_rrh[sc.users[u].serve_ul] + al.delay.d_bbu +
                  al.delay.d_user[u];
    upd(8, (q.delay_budget_s - used) / q.delay_budget_s);
  }
  RateThresholds thr = compute_thresholds(sc, al.delay, active);
  for (int j = 0; j < sc.n_rrh(); ++j)
    if (thr.rrh_used[j]) upd(9, (rates.rrh_ul[j] - thr.rrh[j]) / thr.rrh[j]);
  bool any_user = false;
  for (int u = 0; u < sc.n_users(); ++u) any_user = any_user || active[u];
  if (any_user) {
    upd(10, (rates.fh_ul - thr.bbu) / thr.bbu);
    for (int u = 0; u < sc.n_users(); ++u)
      if (active[u]) upd(11, (rates.user_dl[u] - thr.user[u]) / thr.user[u]);
    double den_ul = std::max({1.0, rates.ac_ul, rates.fh_ul});
    upd(12, (rates.fh_ul - rates.ac_ul) / den_ul);
    double den_dl = std::max({1.0, rates.ac_dl, rates.fh_dl});
    upd(13, (rates.ac_dl - rates.fh_dl) / den_dl);
  }
  for (int s = 0; s < sc.n_slices; ++s)
    for (int d = 0; d < kDirs; ++d) {
      if (sc.rsv(s, d) <= 0) continue;
      bool any = false;
      for (int u = 0; u < sc.n_users() && !any; ++u)
        any = active[u] && sc.users[u].slice == s;
      if (!any) continue;
      upd(14, (rates.slice_q[s * kDirs + d] - sc.rsv(s, d)) / sc.rsv(s, d));
    }

  rep.worst = *std::min_element(rep.family.begin(), rep.family.end());
  return rep;
}

}  // namespace cran
