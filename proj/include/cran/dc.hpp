#pragma once

#include <vector>

#include "cran/allocation.hpp"
#include "cran/scenario.hpp"

namespace cran {

// Difference-of-concave split of the weighted access rate
//   tau * r  =  f - g - y
// with
//   f = (w/ln2) * ln(sigma + I + tau*p*h)     (concave in each block)
//   g = (w/ln2) * ln(sigma + I)               (concave, linearized)
//   y = tau * c * sqrt(1 - 1/(1+g_eff)^2)     (neither, linearized)
// where g_eff = tau*p*h/(sigma+I) and c = sqrt(w/phi)*Qinv(xi)/ln2.
// The identity holds exactly at binary tau; for fractional tau the pieces
// define the time-sharing surrogate used by the solver.
//
// Scalar core: values and partials with respect to the own effective signal
// power E = tau*p*h and the denominator N = sigma + I.  Block gradients
// follow by chain rule through the affine maps E(z), N(z).
struct AccessDcScalar {
  double f = 0, g = 0, y = 0;
  double df_dE = 0, df_dN = 0;  // both equal kappa/(N+E)
  double dg_dN = 0;             // kappa/N
  double dy_dE = 0, dy_dN = 0;  // tau * c * dS/d.
  double y_lead = 0;            // c * S, the product-rule part of dy/dtau
};

AccessDcScalar access_dc_scalar(double e, double n, double tau, double w,
                                double phi, double qinv_xi);

// Fronthaul split x * r = f - g with
//   f = x * (w/ln2) * ln(1 + p*h/sigma),   g = x * c * sqrt(1-1/(1+g)^2).
// Exact for every x in [0,1] since x enters linearly.  Links are
// interference-free, so derivatives with respect to other links' variables
// are structurally zero.
struct FronthaulDcScalar {
  double cap = 0;       // (w/ln2)*ln(1+gamma): f per unit x
  double disp = 0;      // c*S(gamma): g per unit x
  double dcap_dp = 0;   // derivative per unit x
  double ddisp_dp = 0;
};

FronthaulDcScalar fronthaul_dc_scalar(double p, double h, double sigma,
                                      double w, double phi, double qinv_xi);

// Full-tensor decomposition of one access link at the current allocation,
// with analytic gradients over every user's tau and p on the same
// subcarrier/direction (entries for same-cell users other than u are zero;
// the own-cell entry of dg is always zero).
struct AccessDc {
  double f = 0, g = 0, y = 0;
  std::vector<double> df_dtau, dg_dtau, dy_dtau;  // per user index
  std::vector<double> df_dp, dg_dp, dy_dp;
};

AccessDc dc_decompose_access(const Scenario& sc, const ChannelRealization& ch,
                             const Allocation& al, const std::vector<char>& active,
                             int u, int k, int q);

struct FronthaulDc {
  double f = 0, g = 0;
  double df_dx = 0, dg_dx = 0;
  double df_dp = 0, dg_dp = 0;
};

FronthaulDc dc_decompose_fronthaul(const Scenario& sc,
                                   const ChannelRealization& ch,
                                   const Allocation& al, int j, int k, int q);

// First-order (affine) model of a concave piece around z0.  For concave
// pieces this over-estimates everywhere, which is what keeps the convexified
// constraint sets inside the true ones.
struct AffineModel {
  double c0 = 0;                 // value at the expansion point
  std::vector<int> idx;          // variable indices
  std::vector<double> coef;      // gradient entries
  double at(const std::vector<double>& z, const std::vector<double>& z0) const {
    double v = c0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      v += coef[i] * (z[idx[i]] - z0[idx[i]]);
    return v;
  }
};

}  // namespace cran
