#include "cran/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cran/rng.hpp"
#include "cran/units.hpp"

namespace cran {

std::vector<RunResult> run_monte_carlo(const ScenarioConfig& cfg,
                                       const RunConfig& rc, int n,
                                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("realization count must be positive");
  std::vector<RunResult> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::uint64_t su = static_cast<std::uint64_t>(i);
    Scenario sc = generate_scenario(cfg, mix_seed(seed, 2 * su));
    ChannelRealization ch = draw_channels(sc, mix_seed(seed, 2 * su + 1));
    out.push_back(run_algorithm1(sc, ch, rc));
  }
  return out;
}

RunMetrics compute_metrics(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  RunMetrics m;
  m.n_runs = static_cast<int>(runs.size());
  m.power_dbm_each.assign(runs.size(),
                          std::numeric_limits<double>::quiet_NaN());
  double watt_sum = 0;
  double sar_sum = 0;
  double iter_sum = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunResult& r = runs[i];
    int total = static_cast<int>(r.admitted.size());
    sar_sum += total > 0 ? 100.0 * r.n_admitted() / total : 0.0;
    iter_sum += r.total_outer_iters;
    bool counted = r.status == RunStatus::kConverged && r.feasible;
    if (counted) {
      watt_sum += r.total_power_w;
      m.power_dbm_each[i] = r.total_power_dbm;
      ++m.n_converged;
    }
  }
  m.sar_percent = sar_sum / m.n_runs;
  m.mean_iterations = iter_sum / m.n_runs;
  m.mean_power_dbm =
      m.n_converged > 0
          ? watt_to_dbm(std::max(watt_sum / m.n_converged, kNoiseFloorW))
          : std::numeric_limits<double>::quiet_NaN();
  return m;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

// Queue floors only bind at desk bandwidths with a small QoS exponent and a
// millisecond budget; the deadline-driven sweeps pin that profile.
void apply_tight_delay_profile(ScenarioConfig& cfg, double budget_s) {
  cfg.qos.theta_rrh = cfg.qos.theta_bbu = cfg.qos.theta_user = 1e-3;
  cfg.qos.delay_budget_s = budget_s;
}

}  // namespace

SweepSpec make_sweep(const std::string& name, const ScenarioConfig& base,
                     const RunConfig& base_rc) {
  SweepSpec spec;
  spec.name = name;
  if (name == "users") {
    spec.param_header = "users";
    for (int total : {4, 6, 8, 10}) {
      SweepPoint p{std::to_string(total), base, base_rc};
      p.cfg.users_per_slice = {total / 2, total - total / 2};
      spec.points.push_back(std::move(p));
    }
  } else if (name == "rrsv") {
    spec.param_header = "rsv_bps_hz";
    for (double v : {0.0, 1.0, 2.0}) {
      SweepPoint p{format_g(v), base, base_rc};
      p.cfg.rsv_rate_bps_hz.assign(p.cfg.users_per_slice.size(), v);
      spec.points.push_back(std::move(p));
    }
  } else if (name == "per") {
    spec.param_header = "xi";
    for (double v : {1e-7, 1e-5, 1e-3, 1e-2}) {
      SweepPoint p{format_g(v), base, base_rc};
      p.cfg.qos.xi = v;
      spec.points.push_back(std::move(p));
    }
  } else if (name == "delay") {
    spec.param_header = "delay_ms";
    for (double ms : {1.0, 2.0, 5.0, 10.0}) {
      SweepPoint p{format_g(ms), base, base_rc};
      apply_tight_delay_profile(p.cfg, ms * 1e-3);
      spec.points.push_back(std::move(p));
    }
  } else if (name == "baseline-compare") {
    spec.param_header = "delay_ms,mode";
    for (double ms : {1.0, 2.0, 5.0, 10.0})
      for (int fixed = 0; fixed < 2; ++fixed) {
        SweepPoint p{format_g(ms) + (fixed ? ",fixed" : ",dynamic"), base,
                     base_rc};
        apply_tight_delay_profile(p.cfg, ms * 1e-3);
        p.rc.delay_mode = fixed ? DelayMode::kFixed : DelayMode::kDynamic;
        spec.points.push_back(std::move(p));
      }
  } else {
    throw std::invalid_argument("unknown sweep: " + name);
  }
  return spec;
}

std::string sweep_csv(const SweepSpec& spec, int n, std::uint64_t seed) {
  std::ostringstream out;
  out << spec.param_header
      << ",mean_power_dbm,sar_percent,mean_iterations,n_converged\n";
  for (const SweepPoint& p : spec.points) {
    RunMetrics m = compute_metrics(run_monte_carlo(p.cfg, p.rc, n, seed));
    out << p.param << ',' << format_g(m.mean_power_dbm) << ','
        << format_g(m.sar_percent) << ',' << format_g(m.mean_iterations) << ','
        << m.n_converged << '\n';
  }
  return out.str();
}

std::string convergence_trace_csv(const ScenarioConfig& cfg,
                                  const RunConfig& rc, std::uint64_t seed) {
  Scenario sc = generate_scenario(cfg, mix_seed(seed, 0));
  ChannelRealization ch = draw_channels(sc, mix_seed(seed, 1));
  RunResult res = run_algorithm1(sc, ch, rc);
  std::size_t start =
      res.round_starts.empty() ? 0 : res.round_starts.back();
  std::ostringstream out;
  out << "iter,objective\n";
  for (std::size_t i = start; i < res.objective_trace.size(); ++i)
    out << (i - start + 1) << ',' << format_g(res.objective_trace[i]) << '\n';
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

QoSParams qos_from_json(const nlohmann::json& j, QoSParams q) {
  q.theta_rrh = j.value("theta_rrh", q.theta_rrh);
  q.theta_bbu = j.value("theta_bbu", q.theta_bbu);
  q.theta_user = j.value("theta_user", q.theta_user);
  q.delta_rrh = j.value("delta_rrh", q.delta_rrh);
  q.delta_bbu = j.value("delta_bbu", q.delta_bbu);
  q.delta_user = j.value("delta_user", q.delta_user);
  q.eta = j.value("eta", q.eta);
  q.xi = j.value("xi", q.xi);
  q.delay_budget_s = j.value("delay_budget_s", q.delay_budget_s);
  return q;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig ec;
  ScenarioConfig& c = ec.scenario;
  c.rrh_count = j.value("rrh_count", c.rrh_count);
  if (j.contains("users_per_slice"))
    c.users_per_slice = j["users_per_slice"].get<std::vector<int>>();
  c.k1 = j.value("k1", c.k1);
  c.k2 = j.value("k2", c.k2);
  c.w1_hz = j.value("w1_hz", c.w1_hz);
  c.w2_hz = j.value("w2_hz", c.w2_hz);
  c.noise_psd_dbm_hz = j.value("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  c.p_rrh_dl_dbm = j.value("p_rrh_dl_dbm", c.p_rrh_dl_dbm);
  c.p_rrh_ul_dbm = j.value("p_rrh_ul_dbm", c.p_rrh_ul_dbm);
  c.p_bbu_dl_dbm = j.value("p_bbu_dl_dbm", c.p_bbu_dl_dbm);
  c.p_user_ul_dbm = j.value("p_user_ul_dbm", c.p_user_ul_dbm);
  c.packet_bits = j.value("packet_bits", c.packet_bits);
  c.time_unit_s = j.value("time_unit_s", c.time_unit_s);
  c.pathloss_access = j.value("pathloss_access", c.pathloss_access);
  c.pathloss_fronthaul = j.value("pathloss_fronthaul", c.pathloss_fronthaul);
  c.area_km2 = j.value("area_km2", c.area_km2);
  c.bbu_rrh_distance_m = j.value("bbu_rrh_distance_m", c.bbu_rrh_distance_m);
  c.min_rrh_separation_m =
      j.value("min_rrh_separation_m", c.min_rrh_separation_m);
  if (j.contains("rsv_rate_bps_hz"))
    c.rsv_rate_bps_hz = j["rsv_rate_bps_hz"].get<std::vector<double>>();
  if (j.contains("qos")) c.qos = qos_from_json(j["qos"], c.qos);
  ec.seed = j.value("seed", ec.seed);
  ec.realizations = j.value("realizations", ec.realizations);
  return ec;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace cran
