#pragma once

#include "sagnac/detection.hpp"
#include "sagnac/network.hpp"
#include "sagnac/propagation.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sagnac {

enum class Setup { Standard, Modified, Network };

/// How detector powers are assembled for the drift runner.
/// ClosedForm: traced signal pulses, with the Rayleigh and misalignment
/// backgrounds of the noise budget on the dark port so that a steady run
/// reproduces the budget visibility. Traced: every traced arrival, plus
/// Rayleigh light split evenly between the ports.
enum class BackgroundModel { ClosedForm, Traced };

struct Scenario {
  std::string name;
  Setup setup{Setup::Modified};
  std::uint64_t seed{1};
  std::size_t samples{259200};
  double acquisition_rate_hz{1.0};
  std::size_t moving_average_window{10};

  /// Arm fibers of the modified layout. The standard loop is both joined.
  FiberChannel fiber_a, fiber_b;
  PBSSpec pbs{PBSSpec::from_extinction_db(18.0)};
  double xi{0.97};
  /// Loss of the remaining components, applied once per pass through the
  /// interferometer.
  double component_loss_db{0.0};
  double coherence_time_s{kDefaultCoherenceTime};

  /// Birefringence random-walk step, rad per sample, for every drifting fiber.
  double polarization_sigma{0.05};
  /// Path phase random-walk step, rad per sample.
  double phase_sigma{0.1};
  /// Extra rotation applied between the outbound and return passes.
  double in_flight_sigma{0.0};

  DetectorParams spd1, spd0;
  double target_count_rate_hz{7000.0};
  bool rayleigh{true};
  BackgroundModel background{BackgroundModel::ClosedForm};

  std::optional<Topology> topology;
  std::string user1, user2;
  /// Switch settings for the network setup; resolved automatically when empty.
  SwitchConfig switches;

  static Scenario from_json(const nlohmann::json &j);
  nlohmann::json to_json() const;
  void validate() const;
  /// FNV-1a over the canonical JSON dump.
  std::uint64_t hash() const;
};

/// Loads a scenario file. A file with a "common" block holds several
/// scenarios, each a patch over the common block; `variant` selects one.
Scenario load_scenario(const std::string &path, const std::string &variant = {});
std::vector<std::string> scenario_variants(const std::string &path);

struct RunOutput {
  std::vector<VisibilityRecord> series;
  std::vector<double> net_ma;
  RunStats raw_stats, net_stats, net_ma_stats;
  std::uint64_t seed{0};
  std::uint64_t config_hash{0};
  /// Photons per second at the detectors per unit traced power.
  double photon_scale{0.0};

  void write_csv(std::ostream &os) const;
  nlohmann::json summary(const Scenario &s) const;
};

/// Statistics over the defined entries of a series; NaNs are skipped.
RunStats defined_statistics(const std::vector<double> &series);

RunOutput run_drift_experiment(const Scenario &s);

nlohmann::json run_budget(const Scenario &s);

struct Comparison {
  RunOutput standard, modified;
  nlohmann::json table() const;
  std::string render() const;
};

/// Both scenarios must agree on seed, drift magnitudes and duration.
Comparison compare_setups(const Scenario &standard, const Scenario &modified);

/// Fringe scan of the modified (or network) interferometer at the start state.
std::vector<FringePoint> run_fringe(const Scenario &s, std::size_t points = 64);

nlohmann::json route_report(const Topology &t, const std::string &u1, const std::string &u2);

} // namespace sagnac
