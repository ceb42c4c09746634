#include "cran/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cran/rng.hpp"
#include "cran/units.hpp"

namespace cran {

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

// Pathloss with a 1 m close-in clamp so a user dropped on top of an RRH
// cannot produce a gain above unity.
double pathloss(double d_m, double expo) {
  return std::pow(std::max(d_m, 1.0), -expo);
}

int closest_rrh(const std::vector<Vec2>& rrh, const Vec2& p) {
  int best = 0;
  double bd = dist(rrh[0], p);
  for (int j = 1; j < static_cast<int>(rrh.size()); ++j) {
    double d = dist(rrh[j], p);
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  return best;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.rrh_count < 1) throw std::invalid_argument("rrh_count must be >= 1");
  if (cfg.users_per_slice.empty())
    throw std::invalid_argument("users_per_slice must not be empty");
  for (int n : cfg.users_per_slice)
    if (n < 0) throw std::invalid_argument("users_per_slice entries must be >= 0");
  if (std::accumulate(cfg.users_per_slice.begin(), cfg.users_per_slice.end(), 0) < 1)
    throw std::invalid_argument("at least one user pair required");
  if (cfg.k1 < 1 || cfg.k2 < 1)
    throw std::invalid_argument("subcarrier counts must be >= 1");
  if (cfg.w1_hz <= 0 || cfg.w2_hz <= 0)
    throw std::invalid_argument("subcarrier bandwidths must be > 0");
  if (cfg.area_km2 <= 0) throw std::invalid_argument("area must be > 0");
  if (cfg.bbu_rrh_distance_m <= 0)
    throw std::invalid_argument("bbu_rrh_distance must be > 0");
  if (cfg.packet_bits <= 0) throw std::invalid_argument("packet_bits must be > 0");
  if (cfg.time_unit_s <= 0) throw std::invalid_argument("time_unit must be > 0");
  if (!cfg.rsv_rate_bps_hz.empty() &&
      cfg.rsv_rate_bps_hz.size() != cfg.users_per_slice.size())
    throw std::invalid_argument("rsv_rate_bps_hz size must match slice count");

  Rng rng(seed);
  Scenario sc;
  sc.bbu = {0.0, 0.0};
  sc.n_slices = static_cast<int>(cfg.users_per_slice.size());

  // RRHs sit on the fronthaul circle.  Re-draw the whole set whenever two
  // land closer than the minimum separation (chord distance).
  const int J = cfg.rrh_count;
  const double R = cfg.bbu_rrh_distance_m;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000)
      throw std::invalid_argument(
          "cannot place RRHs with the requested minimum separation");
    std::vector<Vec2> cand(J);
    for (int j = 0; j < J; ++j) {
      double ang = rng.uniform(0.0, 2.0 * M_PI);
      cand[j] = {R * std::cos(ang), R * std::sin(ang)};
    }
    bool ok = true;
    for (int a = 0; a < J && ok; ++a)
      for (int b = a + 1; b < J; ++b)
        if (dist(cand[a], cand[b]) < cfg.min_rrh_separation_m) {
          ok = false;
          break;
        }
    if (ok) {
      sc.rrh = std::move(cand);
      break;
    }
  }

  // User pairs: drop 2*I_s points uniformly in the coverage disk, then match
  // them by a uniformly random perfect matching (Fisher-Yates shuffle).
  sc.area_m2 = cfg.area_km2 * 1e6;
  const double disk_r = std::sqrt(sc.area_m2 / M_PI);
  for (int s = 0; s < sc.n_slices; ++s) {
    const int pairs = cfg.users_per_slice[s];
    std::vector<Vec2> pts(2 * pairs);
    for (auto& p : pts) {
      // Uniform in the disk via sqrt radius transform.
      double r = disk_r * std::sqrt(rng.uniform());
      double ang = rng.uniform(0.0, 2.0 * M_PI);
      p = {r * std::cos(ang), r * std::sin(ang)};
    }
    std::vector<int> perm(2 * pairs);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 2 * pairs - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
    for (int i = 0; i < pairs; ++i) {
      UserPair up;
      up.tx = pts[perm[2 * i]];
      up.rx = pts[perm[2 * i + 1]];
      up.slice = s;
      up.serve_ul = closest_rrh(sc.rrh, up.tx);
      up.serve_dl = closest_rrh(sc.rrh, up.rx);
      sc.users.push_back(up);
    }
  }

  sc.k1 = cfg.k1;
  sc.k2 = cfg.k2;
  sc.w1 = cfg.w1_hz;
  sc.w2 = cfg.w2_hz;
  sc.sigma1 = noise_watt(cfg.noise_psd_dbm_hz, cfg.w1_hz);
  sc.sigma2 = noise_watt(cfg.noise_psd_dbm_hz, cfg.w2_hz);
  sc.phi = cfg.time_unit_s;
  sc.omega = cfg.packet_bits;
  sc.pl_access = cfg.pathloss_access;
  sc.pl_fronthaul = cfg.pathloss_fronthaul;
  sc.p_rrh_dl = dbm_to_watt(cfg.p_rrh_dl_dbm);
  sc.p_rrh_ul = dbm_to_watt(cfg.p_rrh_ul_dbm);
  sc.p_bbu_dl = dbm_to_watt(cfg.p_bbu_dl_dbm);
  sc.p_user_ul = dbm_to_watt(cfg.p_user_ul_dbm);
  sc.qos = cfg.qos;
  sc.bbu_rrh_distance_m = cfg.bbu_rrh_distance_m;

  sc.rsv_rate.assign(static_cast<std::size_t>(sc.n_slices) * kDirs, 0.0);
  if (!cfg.rsv_rate_bps_hz.empty()) {
    const double band = cfg.k1 * cfg.w1_hz;
    for (int s = 0; s < sc.n_slices; ++s)
      for (int q = 0; q < kDirs; ++q)
        sc.rsv_rate[s * kDirs + q] = cfg.rsv_rate_bps_hz[s] * band;
  }

  auto errs = sc.validate();
  if (!errs.empty()) throw std::invalid_argument("invalid scenario: " + errs.front());
  return sc;
}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> v;
  if (rrh.empty()) v.push_back("no RRHs");
  if (users.empty()) v.push_back("no user pairs");
  if (n_slices < 1) v.push_back("no slices");
  if (k1 < 1 || k2 < 1) v.push_back("subcarrier counts must be >= 1");
  if (w1 <= 0 || w2 <= 0) v.push_back("subcarrier bandwidth must be > 0");
  if (sigma1 <= 0 || sigma2 <= 0) v.push_back("noise power must be > 0");
  if (phi <= 0) v.push_back("time unit must be > 0");
  if (omega <= 0) v.push_back("packet size must be > 0");
  if (p_rrh_dl <= 0 || p_rrh_ul <= 0 || p_bbu_dl <= 0 || p_user_ul <= 0)
    v.push_back("power budgets must be > 0");
  if (rsv_rate.size() != static_cast<std::size_t>(n_slices) * kDirs)
    v.push_back("reservation table size mismatch");
  for (double r : rsv_rate)
    if (r < 0) v.push_back("reservation rates must be >= 0");
  for (const auto& u : users) {
    if (u.slice < 0 || u.slice >= n_slices) v.push_back("user slice out of range");
    if (u.serve_ul < 0 || u.serve_ul >= n_rrh() || u.serve_dl < 0 ||
        u.serve_dl >= n_rrh())
      v.push_back("user serving RRH out of range");
  }
  if (qos.xi <= 0 || qos.xi >= 1) v.push_back("xi must be in (0,1)");
  for (double d : {qos.delta_rrh, qos.delta_bbu, qos.delta_user})
    if (d <= 0 || d >= 1) v.push_back("delta targets must be in (0,1)");
  for (double t : {qos.theta_rrh, qos.theta_bbu, qos.theta_user})
    if (t <= 0) v.push_back("theta exponents must be > 0");
  if (qos.eta <= 0) v.push_back("eta must be > 0");
  if (qos.delay_budget_s <= 0) v.push_back("delay budget must be > 0");
  return v;
}

ChannelRealization draw_channels(const Scenario& sc, std::uint64_t seed) {
  Rng rng(seed);
  ChannelRealization ch;
  ch.n_u = sc.n_users();
  ch.n_j = sc.n_rrh();
  ch.k1 = sc.k1;
  ch.k2 = sc.k2;
  ch.access.resize(static_cast<std::size_t>(ch.n_u) * ch.n_j * ch.k1 * kDirs);
  ch.fronthaul.resize(static_cast<std::size_t>(ch.n_j) * ch.k2 * kDirs);

  // Fixed draw order (u, j, k, q) then (j, k, q): part of the reproducibility
  // contract, do not reorder.
  std::size_t idx = 0;
  for (int u = 0; u < ch.n_u; ++u)
    for (int j = 0; j < ch.n_j; ++j)
      for (int k = 0; k < ch.k1; ++k)
        for (int q = 0; q < kDirs; ++q) {
          const Vec2& end = (q == kUl) ? sc.users[u].tx : sc.users[u].rx;
          double d = dist(sc.rrh[j], end);
          ch.access[idx++] = rng.exponential() * pathloss(d, sc.pl_access);
        }
  idx = 0;
  for (int j = 0; j < ch.n_j; ++j)
    for (int k = 0; k < ch.k2; ++k)
      for (int q = 0; q < kDirs; ++q) {
        double d = dist(sc.rrh[j], sc.bbu);
        ch.fronthaul[idx++] = rng.exponential() * pathloss(d, sc.pl_fronthaul);
      }
  return ch;
}

}  // namespace cran
