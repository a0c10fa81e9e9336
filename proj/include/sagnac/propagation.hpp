#pragma once

#include "sagnac/components.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sagnac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchedulingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The two counter-propagating pulses, named by the BS output they leave
/// through: ViaA heads for arm a first, ViaB for arm b first.
enum class Pulse { ViaA = 0, ViaB = 1 };

/// A user's modulator pair (AM + PM). It fires on `fires_on` when that pulse
/// passes back toward Charlie after `fire_bounce` mirror reflections.
struct ModulatorStation {
  std::string user;
  Role role{Role::Alice};
  Pulse fires_on{Pulse::ViaB};
  int fire_bounce{2};
  double loss_db{0.0};
};

struct DelayLine {
  std::string name;
  double delay_s{0.0};
  double loss_db{0.0};
};

using ArmElement = std::variant<FiberChannel, ModulatorStation, DelayLine>;

/// One interferometer arm, listed from the PBS outward and terminated by a
/// Faraday mirror owned by `mirror_owner` (a user, or "Charlie").
struct Arm {
  std::vector<ArmElement> elements;
  std::string mirror_owner;

  double total_length_km() const;
  double one_way_delay_s() const;
  /// The first fiber of the arm, if any.
  const FiberChannel *first_fiber() const;
  FiberChannel *first_fiber();
};

/// Complete description of the modified Sagnac of the three-node layout:
/// BS -> c_a/c_b -> PC -> PBS -> arms (a, b) with FMs, PBSs joined by c_ab.
struct InterferometerState {
  JonesVector source_sop{JonesVector::horizontal()};
  double source_power{1.0};

  FiberChannel c_a, c_b, c_ab;
  Arm arm_a, arm_b;
  PBSSpec pbs_a, pbs_b;

  /// Horizontal power fraction the controllers achieve at the PBS inputs.
  double xi_a{1.0}, xi_b{1.0}, xi_ab{1.0};
  JonesMatrix pc_a{}, pc_b{}, pc_ab{};

  double coherence_time_s{kDefaultCoherenceTime};
  /// Events below this fraction of the source power are dropped.
  double power_cutoff{1e-16};

  void validate() const;
};

/// The fixed controllers are set once against the current channel state,
/// mirroring a manual alignment at the start of a run.
void align_controllers(InterferometerState &s);

/// Three-node layout with one user station per arm; controllers aligned.
InterferometerState make_three_node(const FiberChannel &arm_a_fiber, const FiberChannel &arm_b_fiber,
                                    const PBSSpec &pbs = {}, double xi = 1.0);

struct TraceResult {
  double spd1{0.0};
  double spd0{0.0};
  /// Port powers of the arrivals that coincide with the signal pulses.
  double signal_spd1{0.0};
  double signal_spd0{0.0};
  double injected{0.0};
  /// Power lost to PBS dump ports, dangling ports and the event cutoff.
  double lost{0.0};
  /// Returning signal SOPs (normalized) arriving from c_a and c_b.
  JonesVector sop_from_ca{}, sop_from_cb{};
  double power_from_ca{0.0}, power_from_cb{0.0};
  /// Accumulated path phase of each signal pulse.
  std::array<double, 2> arm_phase{0.0, 0.0};
  /// Whether each pulse was modulated, and only on its final user pass.
  std::array<bool, 2> modulated{false, false};
  /// Power entering each arm's first fiber on the outbound pass.
  std::array<double, 2> arm_launch{0.0, 0.0};
  std::size_t events{0};

  /// (P1 - P0) / (P1 + P0); NaN if both ports are dark.
  double visibility() const;
  /// Best achievable fringe visibility of the two signal pulses,
  /// 2 |<x|y>| / (|x|^2 + |y|^2).
  double fringe_visibility() const;
};

TraceResult trace_modified_sagnac(const InterferometerState &s,
                                  const std::optional<ModulationSettings> &m = std::nullopt);

/// Standard Sagnac loop: clockwise pulse sees J, counter-clockwise sees J^T.
TraceResult trace_standard_sagnac(const FiberChannel &loop, const JonesVector &source_sop = {},
                                  double coherence_time_s = kDefaultCoherenceTime);

struct FringePoint {
  double delta{0.0};
  double spd1{0.0};
  double spd0{0.0};
};

/// Sweeps alpha - beta over `deltas` (beta held at 0).
std::vector<FringePoint> interference_fringe(const InterferometerState &s, const std::vector<double> &deltas,
                                             ModulationSettings base = {});

/// Least-squares fit of P(d) = c0 + c1 cos d + c2 sin d; returns
/// sqrt(c1^2 + c2^2) / c0 for the SPD1 series.
double fit_fringe_visibility(const std::vector<FringePoint> &points);

struct TimingEntry {
  std::string component;
  Pulse pulse{Pulse::ViaA};
  Direction direction{Direction::Forward};
  double time_s{0.0};
  bool fires{false};
};

/// Arrival times of both nominal pulses at every modulator and mirror, for a
/// train emitted at `rep_rate_hz`. Throws SchedulingError if a modulator is
/// crossed in both directions within `pulse_width_s` (modulo the pulse period)
/// or fires on a pass that is not that pulse's last user pass.
std::vector<TimingEntry> schedule_pulses(const InterferometerState &s, double rep_rate_hz,
                                         double pulse_width_s = 1e-9);

} // namespace sagnac
