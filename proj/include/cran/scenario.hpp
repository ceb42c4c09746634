#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cran {

// Direction index used throughout: 0 = uplink, 1 = downlink.  The two phases
// live in disjoint bands (FDD), so links only interfere within one direction.
enum Dir : int { kUl = 0, kDl = 1 };
constexpr int kDirs = 2;

struct Vec2 {
  double x = 0, y = 0;
};

double dist(const Vec2& a, const Vec2& b);

// Statistical QoS parameters shared by the delay chain and reliability
// constraints.  Exponents/targets are uniform across entities of one kind.
struct QoSParams {
  double theta_rrh = 10.0;
  double theta_bbu = 10.0;
  double theta_user = 10.0;
  double delta_rrh = 1e-3;   // delay-violation target at the RRH uplink queue
  double delta_bbu = 1e-3;   // ... at the BBU queue
  double delta_user = 1e-3;  // ... at the per-user downlink queue
  double eta = 1.0;          // prefactor of the violation-probability bound
  double xi = 1e-7;          // decoding error target (access and fronthaul)
  double delay_budget_s = 1e-3;  // end-to-end budget per user pair
};

struct ScenarioConfig {
  int rrh_count = 3;
  std::vector<int> users_per_slice = {3, 3};  // pairs per slice
  int k1 = 8;  // access subcarriers
  int k2 = 8;  // fronthaul subcarriers
  double w1_hz = 2e6;
  double w2_hz = 2e6;
  double noise_psd_dbm_hz = -174.0;
  double p_rrh_dl_dbm = 43.0;
  double p_rrh_ul_dbm = 43.0;
  double p_bbu_dl_dbm = 46.0;
  double p_user_ul_dbm = 23.0;
  double packet_bits = 160.0;  // 20-byte tactile packet
  double time_unit_s = 1e-3;
  double pathloss_access = 3.0;
  double pathloss_fronthaul = 3.0;
  double area_km2 = 10.0;
  double bbu_rrh_distance_m = 1000.0;
  double min_rrh_separation_m = 200.0;
  // Slice reservation in bit/s/Hz, applied to both directions; scaled by the
  // total access band (k1 * w1) to get the absolute reservation rate.
  std::vector<double> rsv_rate_bps_hz;
  QoSParams qos;
};

// One tactile user pair: `tx` sends uplink through its closest RRH, the BBU
// relays, and the paired receiver `rx` gets the downlink from its own
// closest RRH (the two serving RRHs may differ).
struct UserPair {
  Vec2 tx, rx;
  int slice = 0;
  int serve_ul = 0;  // closest RRH to tx
  int serve_dl = 0;  // closest RRH to rx
};

struct Scenario {
  Vec2 bbu;
  std::vector<Vec2> rrh;
  std::vector<UserPair> users;
  int n_slices = 0;

  int k1 = 0, k2 = 0;
  double w1 = 0, w2 = 0;        // subcarrier bandwidths (Hz)
  double sigma1 = 0, sigma2 = 0;  // per-subcarrier noise power (W)
  double phi = 0;               // time unit (s)
  double omega = 0;             // packet size (bits)
  double pl_access = 3, pl_fronthaul = 3;
  double p_rrh_dl = 0, p_rrh_ul = 0, p_bbu_dl = 0, p_user_ul = 0;  // W
  std::vector<double> rsv_rate;  // [slice * 2 + dir], bit/s
  QoSParams qos;
  double area_m2 = 0;
  double bbu_rrh_distance_m = 0;

  int n_users() const { return static_cast<int>(users.size()); }
  int n_rrh() const { return static_cast<int>(rrh.size()); }
  double rsv(int s, int q) const { return rsv_rate[s * kDirs + q]; }

  // Returns human-readable violations; empty means the scenario is usable.
  std::vector<std::string> validate() const;

  int serving(int u, int q) const {
    return q == kUl ? users[u].serve_ul : users[u].serve_dl;
  }
};

// Small-scale channel state for one Monte Carlo realization.  Gains combine
// d^-alpha pathloss with unit-mean exponential (Rayleigh power) fading.
struct ChannelRealization {
  int n_u = 0, n_j = 0, k1 = 0, k2 = 0;
  std::vector<double> access;     // [u][j][k1][q]
  std::vector<double> fronthaul;  // [j][k2][q]

  double ac(int u, int j, int k, int q) const {
    return access[((u * n_j + j) * k1 + k) * kDirs + q];
  }
  double fh(int j, int k, int q) const {
    return fronthaul[(j * k2 + k) * kDirs + q];
  }
};

// Places RRHs on the fronthaul circle around the central BBU (uniform
// angles, rejecting draws closer than the minimum separation), drops user
// pairs uniformly in the disk, pairs them by a random perfect matching
// within each slice, and associates each link with its closest RRH.
// Throws std::invalid_argument on nonsensical configuration.
Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

// Same scenario + same seed => identical gains, independent of call site.
ChannelRealization draw_channels(const Scenario& sc, std::uint64_t seed);

}  // namespace cran
