#pragma once

#include "sagnac/polarization.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagnac {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kDefaultGroupIndex = 1.468;
inline constexpr double kDefaultCoherenceTime = 1e-9; // s

/// Raised when a component is driven outside its operating contract, e.g. a
/// modulator asked to act on a pulse that is not on its final pass.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Direction { Forward = +1, Backward = -1 };

inline Direction flipped(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

/// A propagating pulse. The complex amplitude is sqrt(power) * exp(i phase) * sop.
struct OpticalField {
  std::string port;
  Direction direction{Direction::Forward};
  double power{0.0};
  JonesVector sop{};
  double phase{0.0};
  double timestamp{0.0};
  /// Set by the propagation engine when this is the pulse's last pass through
  /// a user's station.
  bool final_pass{false};
  /// Set when this field is an incoherent (power) sum of several inputs.
  bool incoherent{false};

  JonesVector amplitude() const;
  /// Builds a field from a complex amplitude, using `phase_ref` as the phase
  /// bookkeeping value. Zero amplitude gives zero power and an H sop.
  static OpticalField from_amplitude(const JonesVector &amp, const OpticalField &like,
                                     double phase_ref = 0.0);
};

/// 50:50 beamsplitter with +pi/2 on reflection: out1 = (i in1 + in2)/sqrt2,
/// out2 = (in1 + i in2)/sqrt2. Seen from the source side, in1 is the
/// circulator port, out1 = c_a and out2 = c_b; on the way back in1 = c_a,
/// in2 = c_b, out1 = SPD1 (circulator) and out2 = SPD0.
struct BsOutput {
  OpticalField out1;
  OpticalField out2;
};

/// Port-scattering coefficients: {transmission, reflection}.
inline const cplx kBsTransmit{1.0 / 1.4142135623730951, 0.0};
inline const cplx kBsReflect{0.0, 1.0 / 1.4142135623730951};

BsOutput bs_scatter(const std::optional<OpticalField> &in1, const std::optional<OpticalField> &in2,
                    double coherence_time = kDefaultCoherenceTime);

struct PBSSpec {
  /// Fraction of the unwanted polarization that leaks into each spatial mode.
  double eta{0.0};
  double insertion_loss_db{0.0};

  static PBSSpec from_extinction_db(double extinction_db, double insertion_loss_db = 0.0);
  double extinction_ratio_db() const;
  void validate() const;
};

/// Four PBS ports. H passes straight common<->transmit and upper<->dump, V is
/// reflected transmit<->upper and common<->dump.
enum class PbsPort { Common = 0, Transmit = 1, Upper = 2, Dump = 3 };

/// Jones operator carrying light from one PBS port to another, including
/// extinction leakage and insertion loss. Returns the zero matrix for
/// non-connected pairs (same port).
JonesMatrix pbs_transfer(const PBSSpec &spec, PbsPort from, PbsPort to);

struct PbsOutput {
  OpticalField transmitted;
  OpticalField reflected;
};

/// Splits a field entering the common port.
PbsOutput pbs_route(const OpticalField &f, const PBSSpec &spec);

/// FM primitive: applies [[0,1],[-1,0]] in the fixed frame and flips direction.
OpticalField faraday_mirror_reflect(const OpticalField &f);

/// Jones operator of fiber-forward, FM, fiber-backward; equals det(J) A.
JonesMatrix fm_round_trip(const JonesMatrix &fiber);

/// Unitary taking `target` to sqrt(xi) H + sqrt(1-xi) V (exactly H at xi = 1).
JonesMatrix pc_align(const JonesVector &target, double xi = 1.0);

/// Unitary taking `target` to the state with power fraction xi on `axis`
/// (which must be H or V).
JonesMatrix pc_align_to(const JonesVector &target, const JonesVector &axis, double xi = 1.0);

OpticalField attenuate(const OpticalField &f, double loss_db);

inline double db_to_fraction(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

struct FiberChannel {
  double length_km{0.0};
  double attenuation_db_per_km{0.0};
  double backscatter_per_km{0.0};
  double group_index{kDefaultGroupIndex};
  /// Birefringence drift magnitude, rad per sample.
  double polarization_sigma{0.0};
  /// Phase random-walk step, rad per sample.
  double phase_sigma{0.0};

  /// Current forward Jones operator and common path phase.
  JonesMatrix unitary{};
  double phase{0.0};
  /// Operator in force when light comes back, if the fiber changed during the
  /// round trip. Unset under the slow-drift assumption.
  std::optional<JonesMatrix> return_unitary;

  double alpha_np_per_km() const;
  /// One-way power transmission exp(-alpha' L).
  double transmission() const;
  double delay_s() const;

  OpticalField propagate(const OpticalField &f) const;
};

/// Three-port circulator: 1 -> 2 -> 3. Light entering port 3 is blocked.
struct Circulator {
  double loss_db{0.0};

  /// Output port for an input port, or -1 when blocked.
  int route(int in_port) const;
  /// Carries `f` from `in_port` to the next port; port label becomes "circ:<n>".
  std::optional<OpticalField> pass(const OpticalField &f, int in_port) const;
};

/// Optical delay line: shifts the timestamp, leaves SOP and phase alone.
OpticalField delay_line(const OpticalField &f, double delay_s, double loss_db = 0.0);

/// Mechanical 1xN switch. The field leaves through the selected output.
struct OpticalSwitch {
  std::string id;
  std::vector<std::string> outputs;
  std::size_t position{0};
  double loss_db{0.0};

  OpticalField pass(const OpticalField &f) const;
};

enum class Role { Alice, Bob };

struct ModulationSettings {
  /// Target mean photon numbers per pulse; negative means "keep power and
  /// apply the amplitude factor instead".
  double mu_a{-1.0};
  double mu_b{-1.0};
  double alpha{0.0};
  double beta{0.0};
  double amplitude_a{1.0};
  double amplitude_b{1.0};
  double pulse_rate_hz{2e6};
  double wavelength_nm{1550.0};

  void validate() const;
};

double photon_energy_j(double wavelength_nm);

/// Applies the role's encoded phase and amplitude. Throws ContractViolation if
/// the field is not flagged as on its final pass.
OpticalField modulate(const OpticalField &f, const ModulationSettings &m, Role role);

/// Wraps a phase into [0, 2 pi).
double wrap_phase(double phi);

} // namespace sagnac
