#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cran/orchestrator.hpp"
#include "cran/scenario.hpp"

namespace cran {

// Aggregated outcome of one sweep point.
struct RunMetrics {
  std::vector<double> power_dbm_each;  // per realization; NaN if not counted
  double mean_power_dbm = 0;           // watt-averaged over counted runs
  double sar_percent = 0;              // mean acceptance ratio, all runs
  double mean_iterations = 0;          // mean outer iterations, all runs
  int n_converged = 0;                 // converged and feasible runs
  int n_runs = 0;
};

// Sequential Monte Carlo: realization i draws its own topology and fading
// from seeds mixed deterministically out of the base seed.
std::vector<RunResult> run_monte_carlo(const ScenarioConfig& cfg,
                                       const RunConfig& rc, int n,
                                       std::uint64_t seed);

// Power is averaged in watts over converged realizations, then converted;
// acceptance ratios average over every run (a run with nobody left scores 0).
RunMetrics compute_metrics(const std::vector<RunResult>& runs);

// One sweep point: the parameter cell(s) for the CSV plus the full setup.
struct SweepPoint {
  std::string param;
  ScenarioConfig cfg;
  RunConfig rc;
};

struct SweepSpec {
  std::string name;
  std::string param_header;  // comma-joined parameter column names
  std::vector<SweepPoint> points;
};

// Figure-reproduction sweeps: users | rrsv | per | delay | baseline-compare.
// Throws std::invalid_argument on an unknown name.
SweepSpec make_sweep(const std::string& name, const ScenarioConfig& base,
                     const RunConfig& base_rc);

// Runs a sweep and renders the metrics table as CSV text.  Every point uses
// the same seed stream, so repeated invocations are byte-identical.
std::string sweep_csv(const SweepSpec& spec, int n, std::uint64_t seed);

// Objective trace of a single run as "iter,objective" CSV (final admission
// round, non-increasing by construction).
std::string convergence_trace_csv(const ScenarioConfig& cfg,
                                  const RunConfig& rc, std::uint64_t seed);

// Shortest round-trip-safe decimal rendering used in all CSV cells.
std::string format_g(double v);

// Writes text to a file, throwing std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& text);

// Parses a scenario/experiment configuration from JSON text or a file.
// Unknown keys are ignored; missing keys keep their defaults.
struct ExperimentConfig {
  ScenarioConfig scenario;
  std::uint64_t seed = 1;
  int realizations = 50;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace cran
