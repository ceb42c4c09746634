#pragma once

#include <vector>

#include "cran/allocation.hpp"
#include "cran/phy.hpp"
#include "cran/scenario.hpp"

namespace cran {

// Effective bandwidth of a constant-rate source lambda under QoS exponent
// theta: lambda*(e^theta - 1)/theta.
double effective_bandwidth(double lambda, double theta);

// Large-deviation bound on the probability that queueing delay exceeds d:
// eta * exp(-lambda*(e^theta - 1)*d).
double delay_violation_prob(double lambda, double theta, double d, double eta);

// Minimal service rate that keeps the delay-violation probability at target
// delta for deadline d: ln(1/delta) / ((e^theta - 1) * d).
double min_rate_threshold(double delta, double theta, double d);

// Service rates offered to the three queue stages, taken from the weighted
// rate aggregates of the current allocation.
struct ArrivalRates {
  std::vector<double> rrh_ul;   // per RRH
  double bbu = 0;               // fronthaul uplink total
  std::vector<double> user_dl;  // per user
};

ArrivalRates arrival_rates(const RateReport& rates);

// Residuals of the delay chain at a given split (positive = satisfied):
//   budget: per user, delay budget minus the sum over its three queues;
//   rate_*: offered rate minus the queue's minimal rate for its deadline.
struct DelayChainReport {
  std::vector<double> budget;     // per user pair
  std::vector<double> rate_rrh;   // per RRH
  double rate_bbu = 0;
  std::vector<double> rate_user;  // per user pair
};

DelayChainReport check_delay_chain(const DelaySplit& split,
                                   const ArrivalRates& rates,
                                   const Scenario& sc,
                                   const std::vector<char>& active);

// Flow conservation residuals between access and fronthaul (positive =
// satisfied): uplink fronthaul must carry what access collects, downlink
// access must drain what fronthaul delivers.
struct FlowReport {
  double ul = 0;  // fh_ul - ac_ul
  double dl = 0;  // ac_dl - fh_dl
};

FlowReport flow_conservation_check(const RateReport& rates);

}  // namespace cran
