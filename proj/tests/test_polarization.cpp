#include "sagnac/polarization.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace sagnac;

namespace {

JonesVector random_state(std::mt19937_64 &rng) { return random_unitary(rng) * JonesVector::horizontal(); }

// Fringe of |e^{i theta} a + b|^2 / 2 sampled on a grid.
double sweep_visibility(const JonesVector &a, const JonesVector &b, int angles) {
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < angles; ++k) {
    const double theta = 2.0 * kPi * k / angles;
    const JonesVector sum = a * std::polar(1.0, theta) + b;
    const double p = sum.norm2() / 2.0;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return (hi - lo) / (hi + lo);
}

} // namespace

TEST_CASE("fidelity of basis states") {
  const auto h = JonesVector::horizontal();
  const auto v = JonesVector::vertical();
  const auto d = JonesVector::diagonal();
  CHECK(fidelity(h, h) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(h, v) == 0.0);
  CHECK(fidelity(h, d) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fidelity rejects unnormalized input") {
  const JonesVector big{2.0, 0.0};
  CHECK_THROWS_AS(fidelity(big, JonesVector::horizontal()), PreconditionError);
  CHECK_THROWS_AS(overlap_visibility(JonesVector::horizontal(), JonesVector{0.0, 0.0}), PreconditionError);
}

TEST_CASE("overlap visibility of basis states") {
  CHECK(overlap_visibility(JonesVector::horizontal(), JonesVector::horizontal()) == doctest::Approx(1.0));
  CHECK(overlap_visibility(JonesVector::horizontal(), JonesVector::vertical()) == 0.0);
}

TEST_CASE("overlap visibility matches a brute-force phase sweep") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_state(rng), b = random_state(rng);
    CHECK(overlap_visibility(a, b) == doctest::Approx(sweep_visibility(a, b, 10000)).epsilon(1e-6));
  }
}

TEST_CASE("fidelity is symmetric, phase blind and unitarily invariant") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_state(rng), b = random_state(rng);
    const auto u = random_unitary(rng);
    const double f = fidelity(a, b);
    CHECK(std::abs(f - fidelity(b, a)) < 1e-12);
    CHECK(std::abs(f - fidelity(u * a, u * b)) < 1e-12);
    CHECK(std::abs(f - fidelity(a * std::polar(1.0, 0.7), b)) < 1e-12);
    const double vis = overlap_visibility(a, b);
    CHECK(std::abs(vis * vis - f) < 1e-12);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("random_unitary is deterministic per seed") {
  const auto u1 = random_unitary(std::uint64_t{42});
  const auto u2 = random_unitary(std::uint64_t{42});
  CHECK((u1 - u2).max_abs() == 0.0);
  CHECK((u1 - random_unitary(std::uint64_t{43})).max_abs() > 0.0);
}

TEST_CASE("random_unitary samples are unitary and Haar distributed") {
  std::mt19937_64 rng(2024);
  double m1 = 0, m2 = 0, m3 = 0;
  constexpr int n = 100000;
  bool all_unitary = true;
  for (int i = 0; i < n; ++i) {
    const auto u = random_unitary(rng);
    all_unitary = all_unitary && u.is_unitary(1e-12);
    const auto s = stokes_from_jones(u * JonesVector::horizontal());
    m1 += s.s1;
    m2 += s.s2;
    m3 += s.s3;
  }
  CHECK(all_unitary);
  CHECK(std::sqrt(m1 * m1 + m2 * m2 + m3 * m3) / n < 0.02);
}

TEST_CASE("transpose sandwich of the antisymmetric primitive") {
  std::mt19937_64 rng(8);
  const auto a = JonesMatrix::antisymmetric();
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto u = random_unitary(rng);
    worst = std::max(worst, (u.transpose() * a * u - a * u.det()).max_abs());
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("stokes convention anchors") {
  auto check = [](const JonesVector &j, double s1, double s2, double s3) {
    const auto s = stokes_from_jones(j);
    CHECK(s.s1 == doctest::Approx(s1));
    CHECK(s.s2 == doctest::Approx(s2));
    CHECK(s.s3 == doctest::Approx(s3));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-9));
  };
  check(JonesVector::horizontal(), 1, 0, 0);
  check(JonesVector::vertical(), -1, 0, 0);
  check(JonesVector::diagonal(), 0, 1, 0);
  check(JonesVector::circular_right(), 0, 0, 1);
  const double r = 1.0 / std::sqrt(2.0);
  check(JonesVector{cplx{r, 0}, cplx{0, r}}, 0, 0, 1);
}

TEST_CASE("pure states map onto the unit sphere") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(std::abs(stokes_from_jones(random_state(rng)).norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("drift with zero sigma stays put") {
  const auto start = random_unitary(std::uint64_t{9});
  DriftProcess p(0.0, 1, start);
  for (int i = 0; i < 1000; ++i) {
    drift_step(p);
  }
  CHECK((p.current() - start).max_abs() < 1e-12);
}

TEST_CASE("drift is deterministic and stays unitary") {
  DriftProcess a(0.05, 77), b(0.05, 77);
  bool same = true, unitary = true;
  for (int i = 0; i < 100000; ++i) {
    const auto &x = a.step();
    const auto &y = b.step();
    same = same && (x - y).max_abs() == 0.0;
    unitary = unitary && x.is_unitary(1e-12);
  }
  CHECK(same);
  CHECK(unitary);
}

TEST_CASE("slow drift visits every octant of the sphere") {
  DriftProcess p(0.01, 123);
  std::set<int> octants;
  for (int i = 0; i < 1000000; ++i) {
    const auto s = stokes_from_jones(p.step() * JonesVector::horizontal());
    octants.insert((s.s1 > 0) | (s.s2 > 0) << 1 | (s.s3 > 0) << 2);
  }
  CHECK(octants.size() == 8);
}

TEST_CASE("drift step angle scales with sigma") {
  // The mean rotation angle of one step is sigma sqrt(2/pi) for |N(0, sigma^2)|.
  for (double sigma : {0.01, 0.1}) {
    DriftProcess p(sigma, 5);
    double sum = 0.0;
    constexpr int n = 20000;
    JonesMatrix prev = p.current();
    for (int i = 0; i < n; ++i) {
      const JonesMatrix cur = p.step();
      const cplx tr = (cur * prev.adjoint()).a + (cur * prev.adjoint()).d;
      sum += 2.0 * std::acos(std::min(1.0, std::abs(tr) / 2.0));
      prev = cur;
    }
    CHECK(sum / n == doctest::Approx(sigma * std::sqrt(2.0 / kPi)).epsilon(0.03));
  }
}
