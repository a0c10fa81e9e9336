#pragma once

#include <cstdint>

namespace sagnac {

/// Fiber attenuation in Np/km from dB/km: alpha_dB ln(10) / 10.
double np_from_db(double alpha_db_per_km);
double db_from_np(double alpha_np_per_km);

struct ChannelBudget {
  /// One-way power transmission exp(-alpha' L).
  double t{1.0};
  double gamma_per_km{0.0};
  double alpha_np_per_km{0.0};
  double length_km{0.0};

  static ChannelBudget from_fiber(double length_km, double alpha_db_per_km, double gamma_per_km);
  /// Power transmission along the full signal path, t^2.
  double full_path() const { return t * t; }
};

struct AlignmentBudget {
  /// Horizontal power fraction after the controller.
  double xi{1.0};
  /// PBS extinction fraction.
  double eta{0.0};

  void validate() const;
};

struct PowerBudget {
  double p0{1.0};
  double rayleigh{0.0};
  double noise{0.0};
  double signal{0.0};
};

/// Backscattered power integrated over a fiber of length L:
/// P0 gamma (1 - exp(-2 alpha' L)) / (2 alpha'), with the gamma L P0 limit at
/// vanishing attenuation.
double rayleigh_power(double p0, double gamma_per_km, double alpha_np_per_km, double length_km);

/// Signal-versus-backscatter visibility for one-way transmission t.
/// May be negative when the background dominates.
double rayleigh_visibility(double t, double gamma_per_km, double alpha_np_per_km);

struct MisalignmentPowers {
  double after_pbs{0.0};
  double noise{0.0};
};

MisalignmentPowers misalignment_powers(const AlignmentBudget &b, double p0, double noise_transmission = 1.0);

/// Power that completes the full path: P0 T2 xi^2 (1-eta)^4.
double signal_power(double full_path_transmission, const AlignmentBudget &b, double p0);

/// (T2 xi^2 - eta (1-xi)) / (T2 xi^2 + eta (1-xi)); the approximation assumes
/// eta << 1. `approximation_warning` is set when eta > 0.05.
double misalignment_visibility(double full_path_transmission, const AlignmentBudget &b,
                               bool *approximation_warning = nullptr);

/// Both backgrounds added incoherently against the signal:
/// (S - P_R - P_noise) / (S + P_R + P_noise). A non-positive
/// `full_path_transmission` means "use c.full_path()".
double combined_budget(const ChannelBudget &c, const AlignmentBudget &b, double full_path_transmission = -1.0,
                       PowerBudget *breakdown = nullptr);

struct MonteCarloResult {
  std::uint64_t photons{0};
  std::uint64_t signal{0};
  std::uint64_t noise{0};
  double signal_fraction() const { return photons ? double(signal) / double(photons) : 0.0; }
  double noise_fraction() const { return photons ? double(noise) / double(photons) : 0.0; }
  double visibility() const;
};

/// Photon-by-photon walk through PC -> PBS -> fiber -> FM -> fiber -> PBS and
/// on through the second user, sorting each photon into signal, early
/// (misalignment) noise, or loss.
MonteCarloResult misalignment_monte_carlo(double full_path_transmission, const AlignmentBudget &b,
                                          std::uint64_t photons, std::uint64_t seed);

} // namespace sagnac
