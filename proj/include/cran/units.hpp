#pragma once

#include <cmath>

namespace cran {

// Power unit helpers. All internal computation is done in watts; dBm only
// appears at the configuration and reporting boundary.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Noise power for a band of `bw` Hz given a PSD in dBm/Hz.
inline double noise_watt(double psd_dbm_hz, double bw_hz) {
  return dbm_to_watt(psd_dbm_hz) * bw_hz;
}

constexpr double kLn2 = 0.6931471805599453;

// Floor used when clamping degenerate noise/interference denominators (W).
constexpr double kNoiseFloorW = 1e-30;

}  // namespace cran
