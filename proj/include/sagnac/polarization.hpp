#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace sagnac {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an operation receives an input outside its documented domain.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Two-component complex field amplitude in the fixed lab H/V basis.
/// Global phase is kept: interference depends on it.
struct JonesVector {
  cplx h{1.0, 0.0};
  cplx v{0.0, 0.0};

  static JonesVector horizontal() { return {1.0, 0.0}; }
  static JonesVector vertical() { return {0.0, 1.0}; }
  static JonesVector diagonal();
  static JonesVector circular_right();

  double norm2() const { return std::norm(h) + std::norm(v); }
  bool is_normalized(double tol = 1e-12) const;
  JonesVector normalized() const;

  JonesVector operator*(cplx s) const { return {h * s, v * s}; }
  JonesVector operator+(const JonesVector &o) const { return {h + o.h, v + o.v}; }
  JonesVector operator-(const JonesVector &o) const { return {h - o.h, v - o.v}; }
};

/// <a|b>, conjugate-linear in the first argument.
cplx inner(const JonesVector &a, const JonesVector &b);

/// 2x2 complex operator, row-major: [[a, b], [c, d]].
struct JonesMatrix {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static JonesMatrix identity() { return {}; }
  static JonesMatrix diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }
  /// The Faraday-mirror primitive [[0, 1], [-1, 0]].
  static JonesMatrix antisymmetric() { return {0.0, 1.0, -1.0, 0.0}; }
  static JonesMatrix rotation(double theta);

  JonesMatrix operator*(const JonesMatrix &o) const;
  JonesVector operator*(const JonesVector &x) const;
  JonesMatrix operator*(cplx s) const { return {a * s, b * s, c * s, d * s}; }
  JonesMatrix operator-(const JonesMatrix &o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }

  JonesMatrix transpose() const { return {a, c, b, d}; }
  JonesMatrix adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
  cplx det() const { return a * d - b * c; }

  /// Largest entry modulus.
  double max_abs() const;
  bool is_unitary(double tol = 1e-12) const;
};

/// Poincare-sphere coordinates. Convention: H -> (1,0,0), D -> (0,1,0),
/// (H + iV)/sqrt2 -> (0,0,1).
struct StokesVector {
  double s1{0.0}, s2{0.0}, s3{0.0};
  double norm() const;
};

StokesVector stokes_from_jones(const JonesVector &a);

/// |<a|b>|^2. Both arguments must be normalized.
double fidelity(const JonesVector &a, const JonesVector &b);

/// Fringe visibility of two equal-power beams, sqrt(fidelity).
double overlap_visibility(const JonesVector &a, const JonesVector &b);

/// Haar-distributed U(2) element, deterministic per seed.
JonesMatrix random_unitary(std::uint64_t seed);
JonesMatrix random_unitary(std::mt19937_64 &rng);

/// exp(-i theta/2 n.sigma) for unit axis n.
JonesMatrix su2_rotation(const std::array<double, 3> &axis, double theta);

/// Left-multiplicative random walk on U(2): each step applies a rotation about
/// an axis uniform on the sphere by an angle ~ N(0, sigma^2).
class DriftProcess {
public:
  DriftProcess(double sigma, std::uint64_t seed, JonesMatrix start = JonesMatrix::identity());

  const JonesMatrix &step();
  const JonesMatrix &current() const { return current_; }
  double sigma() const { return sigma_; }

private:
  double sigma_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  JonesMatrix current_;
};

/// Equivalent free function form of DriftProcess::step.
const JonesMatrix &drift_step(DriftProcess &p);

} // namespace sagnac
