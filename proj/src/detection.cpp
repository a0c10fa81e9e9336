#include "sagnac/detection.hpp"

#include "sagnac/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sagnac {

double DetectorParams::duty_cycle() const {
  if (gate_rate_hz <= 0.0) {
    return 1.0;
  }
  return std::min(1.0, gate_rate_hz * gate_width_s);
}

void DetectorParams::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw PreconditionError("DetectorParams: efficiency must lie in [0, 1]");
  }
  if (!(dark_rate_hz >= 0.0 && gate_rate_hz >= 0.0 && gate_width_s >= 0.0 && deadtime_s >= 0.0)) {
    throw PreconditionError("DetectorParams: rates and times must be >= 0");
  }
}

double apply_deadtime(double rate_hz, double deadtime_s) { return rate_hz / (1.0 + rate_hz * deadtime_s); }

double registered_rate(double photon_rate_hz, const DetectorParams &p) {
  if (!(photon_rate_hz >= 0.0)) {
    throw PreconditionError("registered_rate: photon rate must be >= 0");
  }
  p.validate();
  const double duty = p.duty_cycle();
  const double dark = p.dark_scales_with_duty ? p.dark_rate_hz * duty : p.dark_rate_hz;
  return apply_deadtime(p.efficiency * duty * photon_rate_hz + dark, p.deadtime_s);
}

std::uint64_t detect(double photon_rate_hz, const DetectorParams &p, double duration_s, std::mt19937_64 &rng) {
  const double mean = registered_rate(photon_rate_hz, p) * duration_s;
  if (mean <= 0.0) {
    return 0;
  }
  std::poisson_distribution<std::uint64_t> poisson(mean);
  return poisson(rng);
}

std::uint64_t detect(double photon_rate_hz, const DetectorParams &p, double duration_s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return detect(photon_rate_hz, p, duration_s, rng);
}

double photon_rate_for_registered(double target_hz, const DetectorParams &p) {
  p.validate();
  if (p.deadtime_s > 0.0 && target_hz * p.deadtime_s >= 1.0) {
    throw PreconditionError("photon_rate_for_registered: target exceeds the dead-time limit");
  }
  const double incident = target_hz / (1.0 - target_hz * p.deadtime_s);
  const double dark = p.dark_scales_with_duty ? p.dark_rate_hz * p.duty_cycle() : p.dark_rate_hz;
  const double light = incident - dark;
  if (light <= 0.0 || p.efficiency <= 0.0) {
    return 0.0;
  }
  return light / (p.efficiency * p.duty_cycle());
}

Visibility raw_visibility(double c1, double c0) {
  if (!(c1 >= 0.0 && c0 >= 0.0)) {
    throw PreconditionError("raw_visibility: counts must be >= 0");
  }
  const double sum = c1 + c0;
  if (sum == 0.0) {
    return {std::numeric_limits<double>::quiet_NaN(), false, false};
  }
  return {(c1 - c0) / sum, true, false};
}

Visibility net_visibility(double c1, double c0, double d1, double d0) {
  if (!(c1 >= 0.0 && c0 >= 0.0)) {
    throw PreconditionError("net_visibility: counts must be >= 0");
  }
  const double s1 = c1 - d1, s0 = c0 - d0;
  const double sum = s1 + s0;
  if (sum == 0.0) {
    return {std::numeric_limits<double>::quiet_NaN(), false, s1 < 0.0 || s0 < 0.0};
  }
  double v = (s1 - s0) / sum;
  bool clamped = s1 < 0.0 || s0 < 0.0;
  if (v > 1.0 || v < -1.0) {
    v = std::clamp(v, -1.0, 1.0);
    clamped = true;
  }
  return {v, true, clamped};
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window, bool *too_short) {
  if (window == 0) {
    throw PreconditionError("moving_average: window must be >= 1");
  }
  if (too_short) {
    *too_short = series.size() < window;
  }
  std::vector<double> out;
  if (series.size() < window) {
    return out;
  }
  out.reserve(series.size() - window + 1);
  // Direct summation per output keeps every value independent of history.
  for (std::size_t i = window - 1; i < series.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = i + 1 - window; k <= i; ++k) {
      s += series[k];
    }
    out.push_back(s / static_cast<double>(window));
  }
  return out;
}

RunStats run_statistics(std::span<const double> series) {
  if (series.empty()) {
    throw PreconditionError("run_statistics: empty series");
  }
  RunStats s;
  s.max = *std::max_element(series.begin(), series.end());
  s.min = *std::min_element(series.begin(), series.end());
  double sum = 0.0;
  for (double x : series) {
    sum += x;
  }
  s.mean = sum / static_cast<double>(series.size());
  double ss = 0.0;
  for (double x : series) {
    ss += (x - s.mean) * (x - s.mean);
  }
  s.std = std::sqrt(ss / static_cast<double>(series.size()));
  // Keep min <= mean <= max under rounding for constant series.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

} // namespace sagnac
