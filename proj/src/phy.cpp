#include "cran/phy.hpp"

#include <cmath>

#include "cran/qfunc.hpp"
#include "cran/units.hpp"

namespace cran {

double sinr_access(double p, double h, double sigma, double interference) {
  double den = sigma + interference;
  if (den < kNoiseFloorW) den = kNoiseFloorW;
  return p * h / den;
}

double fbl_rate_raw(const LinkRateInputs& in) {
  double inv = 1.0 + in.gamma;
  double v = 1.0 - 1.0 / (inv * inv);
  double disp = std::sqrt(v / (in.phi * in.w)) * gaussian_qinv(in.eps);
  return (in.w / kLn2) * (std::log1p(in.gamma) - disp);
}

double fbl_rate(const LinkRateInputs& in) {
  double r = fbl_rate_raw(in);
  return r > 0.0 ? r : 0.0;
}

double error_prob(double gamma, double w, double phi, double omega) {
  double n = w * phi;  // blocklength in channel uses
  double inv = 1.0 + gamma;
  double v = 1.0 - 1.0 / (inv * inv);
  if (v <= 0.0) return 1.0;  // zero SINR: nothing decodes
  double arg = std::sqrt(n / v) * (std::log1p(gamma) - omega * kLn2 / n);
  return gaussian_q(arg);
}

QApproxParams QApproxParams::make(double omega, double w, double phi) {
  double n = w * phi;
  QApproxParams qp;
  qp.b = std::exp2(omega / n) - 1.0;
  qp.a = 1.0 / (2.0 * M_PI * std::sqrt(std::exp2(2.0 * omega / n) - 1.0));
  qp.slope = qp.a * std::sqrt(n);
  qp.halfwidth = 1.0 / (2.0 * qp.slope);
  return qp;
}

double q_approx(double gamma, const QApproxParams& qp) {
  if (gamma <= qp.b - qp.halfwidth) return 1.0;
  if (gamma >= qp.b + qp.halfwidth) return 0.0;
  return 0.5 - qp.slope * (gamma - qp.b);
}

double q_approx_sinr_threshold(const QApproxParams& qp, double target) {
  if (target >= 1.0) return 0.0;
  double g = qp.b + (0.5 - target) / qp.slope;
  return g > 0.0 ? g : 0.0;
}

std::vector<double> access_interference(const Scenario& sc,
                                        const ChannelRealization& ch,
                                        const Allocation& al,
                                        const std::vector<char>& active) {
  std::vector<double> out(al.tau.size(), 0.0);
  const int U = al.n_u;
  for (int u = 0; u < U; ++u) {
    if (!active[u]) continue;
    for (int k = 0; k < al.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        int j = sc.serving(u, q);
        double acc = 0;
        for (int v = 0; v < U; ++v) {
          if (!active[v] || v == u) continue;
          int f = sc.serving(v, q);
          if (f == j) continue;  // same-cell links are kept orthogonal
          std::size_t vi = al.ai(v, k, q);
          double eff = al.tau[vi] * al.p_ac[vi];
          if (eff <= 0) continue;
          // Downlink: RRH f disturbs this user's receiver.  Uplink: user v
          // disturbs the receiver at RRH j.
          double h = (q == kDl) ? ch.ac(u, f, k, kDl) : ch.ac(v, j, k, kUl);
          acc += eff * h;
        }
        out[al.ai(u, k, q)] = acc;
      }
  }
  return out;
}

RateReport aggregate_rates(const Scenario& sc, const ChannelRealization& ch,
                           const Allocation& al, const std::vector<char>& active) {
  RateReport rep;
  rep.r_ac.assign(al.tau.size(), 0.0);
  rep.r_fh.assign(al.x.size(), 0.0);
  rep.i_ac = access_interference(sc, ch, al, active);
  rep.rrh_ul.assign(al.n_j, 0.0);
  rep.user_dl.assign(al.n_u, 0.0);
  rep.slice_q.assign(static_cast<std::size_t>(sc.n_slices) * kDirs, 0.0);

  const double xi = sc.qos.xi;
  for (int u = 0; u < al.n_u; ++u) {
    if (!active[u]) continue;
    for (int k = 0; k < al.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t i = al.ai(u, k, q);
        double t = al.tau[i];
        if (t <= 0) continue;
        int j = sc.serving(u, q);
        double g = sinr_access(t * al.p_ac[i], ch.ac(u, j, k, q), sc.sigma1,
                               rep.i_ac[i]);
        double r = fbl_rate({sc.w1, sc.phi, g, xi});
        rep.r_ac[i] = r;
        double tr = t * r;
        if (q == kUl) {
          rep.rrh_ul[j] += tr;
          rep.ac_ul += tr;
        } else {
          rep.user_dl[u] += tr;
          rep.ac_dl += tr;
        }
        rep.slice_q[sc.users[u].slice * kDirs + q] += tr;
      }
  }
  for (int j = 0; j < al.n_j; ++j)
    for (int k = 0; k < al.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t i = al.fi(j, k, q);
        double xw = al.x[i];
        if (xw <= 0) continue;
        double g = al.p_fh[i] * ch.fh(j, k, q) / sc.sigma2;
        double r = fbl_rate({sc.w2, sc.phi, g, xi});
        rep.r_fh[i] = r;
        if (q == kUl)
          rep.fh_ul += xw * r;
        else
          rep.fh_dl += xw * r;
      }
  return rep;
}

BudgetReport power_budget_check(const Scenario& sc, const Allocation& al,
                                const std::vector<char>& active) {
  BudgetReport b;
  b.rrh_dl.assign(al.n_j, sc.p_rrh_dl);
  b.user_ul.assign(al.n_u, sc.p_user_ul);
  b.rrh_ul.assign(al.n_j, sc.p_rrh_ul);
  b.bbu_dl = sc.p_bbu_dl;
  for (int u = 0; u < al.n_u; ++u) {
    if (!active[u]) continue;
    for (int k = 0; k < al.k1; ++k) {
      std::size_t iu = al.ai(u, k, kUl);
      std::size_t id = al.ai(u, k, kDl);
      b.user_ul[u] -= al.tau[iu] * al.p_ac[iu];
      b.rrh_dl[sc.users[u].serve_dl] -= al.tau[id] * al.p_ac[id];
    }
  }
  for (int j = 0; j < al.n_j; ++j)
    for (int k = 0; k < al.k2; ++k) {
      std::size_t iu = al.fi(j, k, kUl);
      std::size_t id = al.fi(j, k, kDl);
      b.rrh_ul[j] -= al.x[iu] * al.p_fh[iu];
      b.bbu_dl -= al.x[id] * al.p_fh[id];
    }
  return b;
}

}  // namespace cran
