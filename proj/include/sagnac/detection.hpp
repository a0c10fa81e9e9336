#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sagnac {

struct DetectorParams {
  double efficiency{0.1};
  double dark_rate_hz{0.0};
  double gate_rate_hz{2e6};
  double gate_width_s{20e-9};
  double deadtime_s{1e-6};
  /// When set, dark counts accrue only during open gates (rate x duty cycle).
  /// Off by default: quoted dark rates are taken as measured under gating.
  bool dark_scales_with_duty{false};

  double duty_cycle() const;
  void validate() const;
};

/// Nonparalyzable dead time: r / (1 + r tau).
double apply_deadtime(double rate_hz, double deadtime_s);

/// Mean registered count rate for a CW photon flux at the detector.
double registered_rate(double photon_rate_hz, const DetectorParams &p);

/// Poisson-sampled counts over `duration_s`.
std::uint64_t detect(double photon_rate_hz, const DetectorParams &p, double duration_s, std::mt19937_64 &rng);
std::uint64_t detect(double photon_rate_hz, const DetectorParams &p, double duration_s, std::uint64_t seed);

/// Incident photon rate that registers `target_hz` counts (dark counts included).
double photon_rate_for_registered(double target_hz, const DetectorParams &p);

struct Visibility {
  double value{0.0};
  /// False when the denominator vanishes; `value` is then NaN.
  bool defined{true};
  /// True when dark subtraction drove a port negative and the result was clamped.
  bool clamped{false};
};

Visibility raw_visibility(double c1, double c0);
Visibility net_visibility(double c1, double c0, double d1, double d0);

struct VisibilityRecord {
  double timestamp_s{0.0};
  double spd1_hz{0.0};
  double spd0_hz{0.0};
  double dark1_hz{0.0};
  double dark0_hz{0.0};
  double raw{0.0};
  double net{0.0};
};

/// Causal flat-kernel average; output has size n - window + 1. A series
/// shorter than the window yields an empty result and sets `too_short`.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 10,
                                   bool *too_short = nullptr);

struct RunStats {
  double max{0.0};
  double min{0.0};
  double mean{0.0};
  double std{0.0};
};

/// Population statistics, in the units of the series (the experiment runner
/// feeds percent).
RunStats run_statistics(std::span<const double> series);

} // namespace sagnac
