#include "cran/qos.hpp"

#include <cmath>

namespace cran {

double effective_bandwidth(double lambda, double theta) {
  return lambda * std::expm1(theta) / theta;
}

double delay_violation_prob(double lambda, double theta, double d, double eta) {
  return eta * std::exp(-lambda * std::expm1(theta) * d);
}

double min_rate_threshold(double delta, double theta, double d) {
  return std::log(1.0 / delta) / (std::expm1(theta) * d);
}

ArrivalRates arrival_rates(const RateReport& rates) {
  ArrivalRates a;
  a.rrh_ul = rates.rrh_ul;
  a.bbu = rates.fh_ul;
  a.user_dl = rates.user_dl;
  return a;
}

DelayChainReport check_delay_chain(const DelaySplit& split,
                                   const ArrivalRates& rates,
                                   const Scenario& sc,
                                   const std::vector<char>& active) {
  DelayChainReport rep;
  const auto& q = sc.qos;
  const int J = sc.n_rrh();
  const int U = sc.n_users();

  rep.budget.assign(U, 0.0);
  for (int u = 0; u < U; ++u) {
    if (!active[u]) continue;
    rep.budget[u] = q.delay_budget_s - split.d_rrh[sc.users[u].serve_ul] -
                    split.d_bbu - split.d_user[u];
  }

  rep.rate_rrh.assign(J, 0.0);
  for (int j = 0; j < J; ++j) {
    // Only RRHs that actually queue uplink traffic have a deadline to meet.
    bool used = false;
    for (int u = 0; u < U && !used; ++u)
      used = active[u] && sc.users[u].serve_ul == j;
    if (!used) continue;
    rep.rate_rrh[j] = rates.rrh_ul[j] -
                      min_rate_threshold(q.delta_rrh, q.theta_rrh, split.d_rrh[j]);
  }

  rep.rate_bbu = rates.bbu -
                 min_rate_threshold(q.delta_bbu, q.theta_bbu, split.d_bbu);

  rep.rate_user.assign(U, 0.0);
  for (int u = 0; u < U; ++u) {
    if (!active[u]) continue;
    rep.rate_user[u] = rates.user_dl[u] -
                       min_rate_threshold(q.delta_user, q.theta_user, split.d_user[u]);
  }
  return rep;
}

FlowReport flow_conservation_check(const RateReport& rates) {
  FlowReport f;
  f.ul = rates.fh_ul - rates.ac_ul;
  f.dl = rates.ac_dl - rates.fh_dl;
  return f;
}

}  // namespace cran
