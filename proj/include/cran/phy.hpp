#pragma once

#include <vector>

#include "cran/allocation.hpp"
#include "cran/scenario.hpp"

namespace cran {

// Inputs for one link's short-packet rate evaluation.
struct LinkRateInputs {
  double w = 0;      // subcarrier bandwidth (Hz)
  double phi = 0;    // time unit (s); w*phi is the blocklength
  double gamma = 0;  // post-combining SINR
  double eps = 0;    // decoding error probability
};

// SINR of an access link: own received power over noise plus co-subcarrier
// interference collected from other cells.
double sinr_access(double p, double h, double sigma, double interference);

// Normal-approximation achievable rate in bit/s,
//   r = (w/ln2) * [ ln(1+g) - sqrt(V/(phi w)) * Qinv(eps) ],  V = 1-1/(1+g)^2,
// clamped at zero when the dispersion penalty exceeds the capacity term.
double fbl_rate(const LinkRateInputs& in);
// Unclamped variant used by the solver surrogates, where negative values
// must stay visible.
double fbl_rate_raw(const LinkRateInputs& in);

// Exact decoding error probability for a fixed packet of `omega` bits per
// time unit: the inverse of fbl_rate in eps (so feeding the result back
// reproduces the rate omega/phi).
double error_prob(double gamma, double w, double phi, double omega);

// Piecewise-linear approximation of the decoding error probability used
// inside the reliability constraints (and only there): 1 below the window,
// 1/2 - a*sqrt(w phi)*(g - b) inside, 0 above.
struct QApproxParams {
  double a = 0;          // 1 / (2 pi sqrt(2^(2 omega/(w phi)) - 1))
  double b = 0;          // 2^(omega/(w phi)) - 1
  double halfwidth = 0;  // 1 / (2 a sqrt(w phi))
  double slope = 0;      // a * sqrt(w phi)

  static QApproxParams make(double omega, double w, double phi);
};
double q_approx(double gamma, const QApproxParams& qp);

// Smallest SINR with q_approx(gamma) <= target; 0 if every SINR qualifies.
double q_approx_sinr_threshold(const QApproxParams& qp, double target);

// Per-link rates and the weighted aggregates entering the QoS, flow and
// slice constraints.  Access links are evaluated at their effective power
// tau*p (so binary assignments reproduce the plain per-link rate), fronthaul
// links at the raw power with the x weight applied in the sums.
struct RateReport {
  std::vector<double> r_ac;      // [u][k1][q] bit/s, clamped
  std::vector<double> r_fh;      // [j][k2][q] bit/s, clamped
  std::vector<double> i_ac;      // [u][k1][q] interference power (W)
  std::vector<double> rrh_ul;    // per RRH: sum tau*r over its uplink users
  std::vector<double> user_dl;   // per user: sum_k tau*r downlink
  std::vector<double> slice_q;   // [s*2+q]: sum tau*r per slice/direction
  double ac_ul = 0, ac_dl = 0;   // access totals of tau*r
  double fh_ul = 0, fh_dl = 0;   // fronthaul totals of x*r
};

RateReport aggregate_rates(const Scenario& sc, const ChannelRealization& ch,
                           const Allocation& al, const std::vector<char>& active);

// Interference seen by each access link under the current allocation:
// sum over co-subcarrier links of other cells of tau*p*h at this receiver.
std::vector<double> access_interference(const Scenario& sc,
                                        const ChannelRealization& ch,
                                        const Allocation& al,
                                        const std::vector<char>& active);

// Budget residuals (budget minus consumed power, active users only).
struct BudgetReport {
  std::vector<double> rrh_dl;  // per RRH: access downlink
  std::vector<double> user_ul; // per user: access uplink
  std::vector<double> rrh_ul;  // per RRH: fronthaul uplink
  double bbu_dl = 0;           // fronthaul downlink, all RRHs
};

BudgetReport power_budget_check(const Scenario& sc, const Allocation& al,
                                const std::vector<char>& active);

}  // namespace cran
