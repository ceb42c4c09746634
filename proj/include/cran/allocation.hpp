#pragma once

#include <vector>

#include "cran/scenario.hpp"

namespace cran {

// Delay budget split across the three queues of the relay chain:
// RRH uplink queue (per RRH), BBU queue, per-user downlink queue.
struct DelaySplit {
  std::vector<double> d_rrh;
  double d_bbu = 0;
  std::vector<double> d_user;
};

// One joint operating point: time-sharing fractions, transmit powers, the
// elastic deficit slacks and the delay split.  Powers are in watts, alpha in
// bit/s.  Entries for users removed by admission control are kept allocated
// (zeroed) so indices stay stable.
struct Allocation {
  int n_u = 0, n_j = 0, k1 = 0, k2 = 0;
  std::vector<double> tau;    // [u][k1][q] in [0,1]
  std::vector<double> p_ac;   // [u][k1][q]
  std::vector<double> x;      // [j][k2][q] in [0,1]
  std::vector<double> p_fh;   // [j][k2][q]
  std::vector<double> alpha;  // [u][k1]
  DelaySplit delay;

  std::size_t ai(int u, int k, int q) const {
    return (static_cast<std::size_t>(u) * k1 + k) * kDirs + q;
  }
  std::size_t fi(int j, int k, int q) const {
    return (static_cast<std::size_t>(j) * k2 + k) * kDirs + q;
  }
  std::size_t wi(int u, int k) const {
    return static_cast<std::size_t>(u) * k1 + k;
  }

  static Allocation zero(const Scenario& sc);
  bool finite() const;
};

// Euclidean distance between the power variables of two allocations; the
// outer-loop stopping rule is ||P_z - P_{z-1}|| over all powers.
double power_distance(const Allocation& a, const Allocation& b);

// Total objective power sum(x*p) + sum(tau*p) restricted to active users.
double total_power(const Scenario& sc, const Allocation& a,
                   const std::vector<char>& active);

}  // namespace cran
