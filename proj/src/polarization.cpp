#include "sagnac/polarization.hpp"

#include <algorithm>
#include <cmath>

namespace sagnac {

JonesVector JonesVector::diagonal() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, s};
}

JonesVector JonesVector::circular_right() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, cplx{0.0, s}};
}

bool JonesVector::is_normalized(double tol) const { return std::abs(norm2() - 1.0) <= tol; }

JonesVector JonesVector::normalized() const {
  const double n = std::sqrt(norm2());
  if (n == 0.0) {
    throw PreconditionError("cannot normalize a zero Jones vector");
  }
  return {h / n, v / n};
}

cplx inner(const JonesVector &a, const JonesVector &b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

JonesMatrix JonesMatrix::rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix &o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

JonesVector JonesMatrix::operator*(const JonesVector &x) const {
  return {a * x.h + b * x.v, c * x.h + d * x.v};
}

double JonesMatrix::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

bool JonesMatrix::is_unitary(double tol) const {
  return ((adjoint() * *this) - identity()).max_abs() <= tol;
}

double StokesVector::norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

StokesVector stokes_from_jones(const JonesVector &a) {
  if (!a.is_normalized(1e-9)) {
    throw PreconditionError("stokes_from_jones: input is not normalized");
  }
  const cplx hv = std::conj(a.h) * a.v;
  return {std::norm(a.h) - std::norm(a.v), 2.0 * hv.real(), 2.0 * hv.imag()};
}

double fidelity(const JonesVector &a, const JonesVector &b) {
  if (!a.is_normalized(1e-9) || !b.is_normalized(1e-9)) {
    throw PreconditionError("fidelity: inputs must be normalized");
  }
  return std::clamp(std::norm(inner(a, b)), 0.0, 1.0);
}

double overlap_visibility(const JonesVector &a, const JonesVector &b) {
  return std::sqrt(fidelity(a, b));
}

JonesMatrix random_unitary(std::mt19937_64 &rng) {
  // Uniform unit quaternion gives Haar SU(2); an independent uniform phase
  // extends it to Haar U(2).
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double &x : q) {
      x = gauss(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-300);
  const double n = std::sqrt(n2);
  const cplx alpha{q[0] / n, q[1] / n};
  const cplx beta{q[2] / n, q[3] / n};
  const cplx phase = std::polar(1.0, uni(rng));
  return JonesMatrix{alpha, -std::conj(beta), beta, std::conj(alpha)} * phase;
}

JonesMatrix random_unitary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(rng);
}

JonesMatrix su2_rotation(const std::array<double, 3> &axis, double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const auto [x, y, z] = axis;
  // exp(-i theta/2 (x sx + y sy + z sz))
  return {cplx{c, -s * z}, cplx{-s * y, -s * x}, cplx{s * y, -s * x}, cplx{c, s * z}};
}

namespace {

// Gram-Schmidt on the columns; keeps long products unitary to machine precision.
JonesMatrix reunitarize(const JonesMatrix &m) {
  cplx c0a = m.a, c0c = m.c;
  const double n0 = std::sqrt(std::norm(c0a) + std::norm(c0c));
  c0a /= n0;
  c0c /= n0;
  cplx c1b = m.b, c1d = m.d;
  const cplx proj = std::conj(c0a) * c1b + std::conj(c0c) * c1d;
  c1b -= proj * c0a;
  c1d -= proj * c0c;
  const double n1 = std::sqrt(std::norm(c1b) + std::norm(c1d));
  return {c0a, c1b / n1, c0c, c1d / n1};
}

} // namespace

DriftProcess::DriftProcess(double sigma, std::uint64_t seed, JonesMatrix start)
    : sigma_(sigma), rng_(seed), current_(start) {
  if (!(sigma >= 0.0)) {
    throw PreconditionError("DriftProcess: sigma must be >= 0");
  }
}

const JonesMatrix &DriftProcess::step() {
  if (sigma_ == 0.0) {
    return current_;
  }
  std::array<double, 3> axis{gauss_(rng_), gauss_(rng_), gauss_(rng_)};
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  for (double &x : axis) {
    x /= n;
  }
  const double theta = sigma_ * gauss_(rng_);
  current_ = reunitarize(su2_rotation(axis, theta) * current_);
  return current_;
}

const JonesMatrix &drift_step(DriftProcess &p) { return p.step(); }

} // namespace sagnac
