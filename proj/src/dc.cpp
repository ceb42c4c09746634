#include "cran/dc.hpp"

#include <cmath>

#include "cran/phy.hpp"
#include "cran/qfunc.hpp"
#include "cran/units.hpp"

namespace cran {

AccessDcScalar access_dc_scalar(double e, double n, double tau, double w,
                                double phi, double qinv_xi) {
  AccessDcScalar s;
  const double kappa = w / kLn2;
  const double cy = std::sqrt(w / phi) * qinv_xi / kLn2;
  const double gamma_big = n + e;
  s.f = kappa * std::log(gamma_big);
  s.g = kappa * std::log(n);
  s.df_dE = kappa / gamma_big;
  s.df_dN = s.df_dE;
  s.dg_dN = kappa / n;

  // sqrt(1 - 1/(1+g)^2) = psi/(N+E) with psi = sqrt(E(E+2N)).  The slope of
  // the dispersion blows up as E -> 0+, so flatten it below a floor; the
  // affected region carries femtowatt-scale signal and no usable rate.
  if (e <= 1e-12 * n) {
    s.y = 0;
    s.dy_dE = s.dy_dN = 0;
    s.y_lead = 0;
    return s;
  }
  const double psi = std::sqrt(e * (e + 2.0 * n));
  const double sval = psi / gamma_big;
  const double ds_de = n * n / (psi * gamma_big * gamma_big);
  const double ds_dn = -e * n / (psi * gamma_big * gamma_big);
  s.y = tau * cy * sval;
  s.dy_dE = tau * cy * ds_de;
  s.dy_dN = tau * cy * ds_dn;
  s.y_lead = cy * sval;
  return s;
}

FronthaulDcScalar fronthaul_dc_scalar(double p, double h, double sigma,
                                      double w, double phi, double qinv_xi) {
  FronthaulDcScalar s;
  const double kappa = w / kLn2;
  const double cy = std::sqrt(w / phi) * qinv_xi / kLn2;
  const double e = p * h;
  s.cap = kappa * std::log1p(e / sigma);
  s.dcap_dp = kappa * h / (sigma + e);
  if (e <= 1e-12 * sigma) {
    s.disp = 0;
    s.ddisp_dp = 0;
    return s;
  }
  const double psi = std::sqrt(e * (e + 2.0 * sigma));
  const double pi_big = sigma + e;
  s.disp = cy * psi / pi_big;
  s.ddisp_dp = cy * h * sigma * sigma / (psi * pi_big * pi_big);
  return s;
}

AccessDc dc_decompose_access(const Scenario& sc, const ChannelRealization& ch,
                             const Allocation& al, const std::vector<char>& active,
                             int u, int k, int q) {
  const int U = al.n_u;
  AccessDc out;
  out.df_dtau.assign(U, 0.0);
  out.dg_dtau.assign(U, 0.0);
  out.dy_dtau.assign(U, 0.0);
  out.df_dp.assign(U, 0.0);
  out.dg_dp.assign(U, 0.0);
  out.dy_dp.assign(U, 0.0);

  const int j = sc.serving(u, q);
  const std::size_t li = al.ai(u, k, q);
  const double h_own = ch.ac(u, j, k, q);
  const double tau = al.tau[li];
  const double p = al.p_ac[li];
  const double e = tau * p * h_own;

  double n = sc.sigma1;
  for (int v = 0; v < U; ++v) {
    if (!active[v] || v == u) continue;
    if (sc.serving(v, q) == j) continue;
    std::size_t vi = al.ai(v, k, q);
    double h = (q == kDl) ? ch.ac(u, sc.serving(v, kDl), k, kDl)
                          : ch.ac(v, j, k, kUl);
    n += al.tau[vi] * al.p_ac[vi] * h;
  }

  const double qinv_xi = gaussian_qinv(sc.qos.xi);
  AccessDcScalar s = access_dc_scalar(e, n, tau, sc.w1, sc.phi, qinv_xi);
  out.f = s.f;
  out.g = s.g;
  out.y = s.y;

  // Own-link entries: E = tau*p*h depends on both variables; g has no own
  // dependence at all (the own signal never enters the denominator).
  out.df_dtau[u] = s.df_dE * p * h_own;
  out.df_dp[u] = s.df_dE * tau * h_own;
  out.dy_dtau[u] = s.y_lead + s.dy_dE * p * h_own;
  out.dy_dp[u] = s.dy_dE * tau * h_own;

  // Cross entries via the interference term N.
  for (int v = 0; v < U; ++v) {
    if (!active[v] || v == u) continue;
    if (sc.serving(v, q) == j) continue;
    std::size_t vi = al.ai(v, k, q);
    double h = (q == kDl) ? ch.ac(u, sc.serving(v, kDl), k, kDl)
                          : ch.ac(v, j, k, kUl);
    double dn_dtau = al.p_ac[vi] * h;
    double dn_dp = al.tau[vi] * h;
    out.df_dtau[v] = s.df_dN * dn_dtau;
    out.df_dp[v] = s.df_dN * dn_dp;
    out.dg_dtau[v] = s.dg_dN * dn_dtau;
    out.dg_dp[v] = s.dg_dN * dn_dp;
    out.dy_dtau[v] = s.dy_dN * dn_dtau;
    out.dy_dp[v] = s.dy_dN * dn_dp;
  }
  return out;
}

FronthaulDc dc_decompose_fronthaul(const Scenario& sc,
                                   const ChannelRealization& ch,
                                   const Allocation& al, int j, int k, int q) {
  FronthaulDc out;
  const std::size_t li = al.fi(j, k, q);
  const double h = ch.fh(j, k, q);
  const double x = al.x[li];
  const double p = al.p_fh[li];
  const double qinv_xi = gaussian_qinv(sc.qos.xi);
  FronthaulDcScalar s = fronthaul_dc_scalar(p, h, sc.sigma2, sc.w2, sc.phi, qinv_xi);
  out.f = x * s.cap;
  out.g = x * s.disp;
  out.df_dx = s.cap;
  out.dg_dx = s.disp;
  out.df_dp = x * s.dcap_dp;
  out.dg_dp = x * s.ddisp_dp;
  return out;
}

}  // namespace cran
