#include "sagnac/noise.hpp"

#include "sagnac/polarization.hpp"

#include <cmath>
#include <random>

namespace sagnac {

double np_from_db(double alpha_db_per_km) {
  if (!(alpha_db_per_km >= 0.0)) {
    throw PreconditionError("np_from_db: attenuation must be >= 0");
  }
  return alpha_db_per_km * std::log(10.0) / 10.0;
}

double db_from_np(double alpha_np_per_km) { return alpha_np_per_km * 10.0 / std::log(10.0); }

ChannelBudget ChannelBudget::from_fiber(double length_km, double alpha_db_per_km, double gamma_per_km) {
  ChannelBudget c;
  c.alpha_np_per_km = np_from_db(alpha_db_per_km);
  c.length_km = length_km;
  c.gamma_per_km = gamma_per_km;
  c.t = std::exp(-c.alpha_np_per_km * length_km);
  return c;
}

void AlignmentBudget::validate() const {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw PreconditionError("AlignmentBudget: xi must lie in [0, 1]");
  }
  if (!(eta >= 0.0 && eta < 0.5)) {
    throw PreconditionError("AlignmentBudget: eta must lie in [0, 0.5)");
  }
}

double rayleigh_power(double p0, double gamma_per_km, double alpha_np_per_km, double length_km) {
  if (!(gamma_per_km >= 0.0 && alpha_np_per_km >= 0.0 && length_km >= 0.0)) {
    throw PreconditionError("rayleigh_power: gamma, alpha' and L must be >= 0");
  }
  const double x = 2.0 * alpha_np_per_km * length_km;
  // (1 - e^{-x}) / (2 alpha') = L (1 - e^{-x}) / x; -expm1 keeps the small-x limit exact.
  const double factor = x < 1e-300 ? length_km : length_km * (-std::expm1(-x)) / x;
  return p0 * gamma_per_km * factor;
}

double rayleigh_visibility(double t, double gamma_per_km, double alpha_np_per_km) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw PreconditionError("rayleigh_visibility: t must lie in (0, 1]");
  }
  if (!(alpha_np_per_km > 0.0) && gamma_per_km > 0.0) {
    throw PreconditionError("rayleigh_visibility: alpha' must be positive when gamma > 0");
  }
  const double t2 = t * t;
  const double bg = gamma_per_km == 0.0 ? 0.0 : (1.0 - t2) * gamma_per_km / (2.0 * alpha_np_per_km);
  return (t2 - bg) / (t2 + bg);
}

MisalignmentPowers misalignment_powers(const AlignmentBudget &b, double p0, double noise_transmission) {
  b.validate();
  return {p0 * ((1.0 - b.eta) * b.xi + b.eta * (1.0 - b.xi)),
          p0 * noise_transmission * b.eta * (1.0 - b.eta) * (1.0 - b.xi)};
}

double signal_power(double full_path_transmission, const AlignmentBudget &b, double p0) {
  if (!(full_path_transmission > 0.0 && full_path_transmission <= 1.0)) {
    throw PreconditionError("signal_power: transmission must lie in (0, 1]");
  }
  b.validate();
  const double q = 1.0 - b.eta;
  return p0 * full_path_transmission * b.xi * b.xi * q * q * q * q;
}

double misalignment_visibility(double full_path_transmission, const AlignmentBudget &b, bool *approximation_warning) {
  if (!(full_path_transmission > 0.0 && full_path_transmission <= 1.0)) {
    throw PreconditionError("misalignment_visibility: transmission must lie in (0, 1]");
  }
  b.validate();
  if (approximation_warning) {
    *approximation_warning = b.eta > 0.05;
  }
  const double s = full_path_transmission * b.xi * b.xi;
  const double n = b.eta * (1.0 - b.xi);
  return (s - n) / (s + n);
}

double combined_budget(const ChannelBudget &c, const AlignmentBudget &b, double full_path_transmission,
                       PowerBudget *breakdown) {
  const double t2 = full_path_transmission > 0.0 ? full_path_transmission : c.full_path();
  PowerBudget pb;
  pb.p0 = 1.0;
  pb.rayleigh = rayleigh_power(pb.p0, c.gamma_per_km, c.alpha_np_per_km, c.length_km);
  pb.noise = misalignment_powers(b, pb.p0).noise;
  pb.signal = signal_power(t2, b, pb.p0);
  if (breakdown) {
    *breakdown = pb;
  }
  const double bg = pb.rayleigh + pb.noise;
  return (pb.signal - bg) / (pb.signal + bg);
}

double MonteCarloResult::visibility() const {
  const double s = double(signal), n = double(noise);
  return (s - n) / (s + n);
}

MonteCarloResult misalignment_monte_carlo(double full_path_transmission, const AlignmentBudget &b,
                                          std::uint64_t photons, std::uint64_t seed) {
  b.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pass = 1.0 - b.eta;
  MonteCarloResult r;
  r.photons = photons;
  enum Pol { H, V };
  for (std::uint64_t i = 0; i < photons; ++i) {
    // Controller in c_a / c_b.
    Pol pol = u(rng) < b.xi ? H : V;
    // Outbound through the PBS: H is the wanted state, V leaks with eta.
    if (u(rng) >= (pol == H ? pass : b.eta)) {
      continue;
    }
    // Fiber, FM, fiber: the state returns orthogonal.
    pol = pol == H ? V : H;
    if (pol == H) {
      // Light that leaked out as V comes back as H and is transmitted
      // toward the beamsplitter: early background.
      if (u(rng) < pass) {
        ++r.noise;
      }
      continue;
    }
    // Wanted V is reflected into c_ab; the eta remainder is discarded.
    if (u(rng) >= pass) {
      continue;
    }
    // Controller in c_ab.
    if (u(rng) >= b.xi) {
      continue;
    }
    // Second PBS: reflected toward the other user, back as H, transmitted.
    if (u(rng) >= pass || u(rng) >= pass) {
      continue;
    }
    if (u(rng) < full_path_transmission) {
      ++r.signal;
    }
  }
  return r;
}

} // namespace sagnac
