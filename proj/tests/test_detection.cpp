#include "sagnac/detection.hpp"
#include "sagnac/polarization.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace sagnac;

namespace {

DetectorParams ideal() {
  DetectorParams p;
  p.efficiency = 1.0;
  p.gate_rate_hz = 0.0;
  p.deadtime_s = 0.0;
  return p;
}

// Raw visibility from a net value, the bright-port signal rate and port darks.
double raw_from_net(double net, double s1, double d1, double d0) {
  const double s0 = s1 * (1 - net) / (1 + net);
  const double c1 = s1 + d1, c0 = s0 + d0;
  return (c1 - c0) / (c1 + c0);
}

} // namespace

TEST_CASE("dead time") {
  CHECK(apply_deadtime(1e6, 1e-6) == doctest::Approx(5e5));
  CHECK(apply_deadtime(1234.0, 0.0) == 1234.0);
  double prev = 0.0;
  for (double r = 1.0; r < 1e10; r *= 3) {
    const double reg = apply_deadtime(r, 1e-6);
    CHECK(reg >= prev);
    CHECK(reg < 1e6);
    prev = reg;
  }
}

TEST_CASE("gate duty cycle") {
  DetectorParams p;
  CHECK(p.duty_cycle() == doctest::Approx(0.04));
  p.gate_rate_hz = 0.0;
  CHECK(p.duty_cycle() == 1.0);
  p.gate_rate_hz = 1e9;
  CHECK(p.duty_cycle() == 1.0);
}

TEST_CASE("registered rate") {
  DetectorParams p;
  p.dark_rate_hz = 244.0;
  CHECK(registered_rate(0.0, p) == doctest::Approx(apply_deadtime(244.0, 1e-6)));
  p.efficiency = 0.0;
  CHECK(registered_rate(1e9, p) == doctest::Approx(apply_deadtime(244.0, 1e-6)));
  p.efficiency = 0.1;
  CHECK(registered_rate(1e6, p) == doctest::Approx(apply_deadtime(0.1 * 0.04 * 1e6 + 244.0, 1e-6)));
  p.dark_scales_with_duty = true;
  CHECK(registered_rate(0.0, p) == doctest::Approx(apply_deadtime(244.0 * 0.04, 1e-6)));
  CHECK_THROWS_AS(registered_rate(-1.0, p), PreconditionError);
  p.efficiency = 1.5;
  CHECK_THROWS_AS(registered_rate(1.0, p), PreconditionError);
}

TEST_CASE("calibration inverts the registered rate") {
  DetectorParams p;
  p.dark_rate_hz = 153.0;
  for (double target : {500.0, 7000.0, 50000.0}) {
    CHECK(registered_rate(photon_rate_for_registered(target, p), p) == doctest::Approx(target).epsilon(1e-12));
  }
  CHECK(photon_rate_for_registered(100.0, p) == 0.0);
  CHECK_THROWS_AS(photon_rate_for_registered(2e6, p), PreconditionError);
}

TEST_CASE("darks only without light") {
  DetectorParams p;
  p.dark_rate_hz = 153.0;
  p.deadtime_s = 0.0;
  std::mt19937_64 rng(3);
  double sum = 0.0;
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) {
    sum += double(detect(0.0, p, 1.0, rng));
  }
  CHECK(std::abs(sum / n - 153.0) < 3 * std::sqrt(153.0 / n));
  CHECK(detect(0.0, ideal(), 1.0, std::uint64_t{1}) == 0);
}

TEST_CASE("counts are Poisson distributed") {
  DetectorParams p;
  p.dark_rate_hz = 244.0;
  const double photons = 1.7e6;
  const double mean = registered_rate(photons, p);
  std::mt19937_64 rng(17);
  constexpr int n = 10000;
  std::vector<double> x(n);
  double m = 0.0;
  for (auto &v : x) {
    v = double(detect(photons, p, 1.0, rng));
    m += v;
  }
  m /= n;
  double var = 0.0;
  for (double v : x) {
    var += (v - m) * (v - m);
  }
  var /= n - 1;
  CHECK(std::abs(m - mean) < 3 * std::sqrt(mean / n));
  // Var of the sample variance of a Poisson variable is about (mu + 2 mu^2) / n.
  CHECK(std::abs(var - mean) < 3 * std::sqrt((mean + 2 * mean * mean) / n));
  CHECK(detect(photons, p, 1.0, std::uint64_t{5}) == detect(photons, p, 1.0, std::uint64_t{5}));
}

TEST_CASE("raw and net visibility") {
  CHECK(raw_visibility(700, 300).value == doctest::Approx(0.4));
  CHECK(raw_visibility(500, 500).value == 0.0);
  CHECK(net_visibility(700, 300, 0, 0).value == raw_visibility(700, 300).value);
  CHECK(net_visibility(744, 353, 44, 53).value == doctest::Approx(0.4));

  const auto undefined = raw_visibility(0, 0);
  CHECK_FALSE(undefined.defined);
  CHECK(std::isnan(undefined.value));
  CHECK_FALSE(net_visibility(100, 100, 100, 100).defined);

  const auto clamped = net_visibility(1000, 100, 0, 150);
  CHECK(clamped.clamped);
  CHECK(clamped.value == 1.0);
  CHECK_THROWS_AS(raw_visibility(-1, 2), PreconditionError);
}

TEST_CASE("raw visibility is the count-weighted mean of net and dark visibility") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1e4);
  int equal_dark_cases = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s1 = u(rng), s0 = u(rng) * 0.5;
    const double d1 = u(rng) * 0.05, d0 = i % 2 ? d1 : u(rng) * 0.05;
    const double c1 = s1 + d1, c0 = s0 + d0;
    const double net = net_visibility(c1, c0, d1, d0).value;
    const double raw = raw_visibility(c1, c0).value;
    const double dark = (d1 - d0) / (d1 + d0);
    const double s = s1 + s0, d = d1 + d0;
    CHECK(raw == doctest::Approx((s * net + d * dark) / (s + d)).epsilon(1e-9));
    CHECK((net >= raw - 1e-12) == (dark <= raw + 1e-12));
    if (d0 == d1 && s1 >= s0) {
      ++equal_dark_cases;
      CHECK(net >= raw - 1e-12);
    }
  }
  CHECK(equal_dark_cases > 1000);
}

TEST_CASE("raw/net arithmetic at the reported operating point") {
  const double s1 = 7000.0, net = 0.953;
  const double s0 = s1 * (1 - net) / (1 + net);
  CHECK(s1 + s0 == doctest::Approx(7168).epsilon(1e-4));
  const double bright244 = raw_from_net(net, s1, 244, 153);
  const double bright153 = raw_from_net(net, s1, 153, 244);
  CHECK(raw_visibility(s1 + 244, s0 + 153).value == doctest::Approx(bright244));
  CHECK(net_visibility(s1 + 244, s0 + 153, 244, 153).value == doctest::Approx(net));
  CHECK(bright244 == doctest::Approx(0.9150).epsilon(1e-4));
  CHECK(bright153 == doctest::Approx(0.8909).epsilon(1e-4));
}

TEST_CASE("moving average") {
  const std::vector<double> flat(25, 95.3);
  for (double v : moving_average(flat)) {
    CHECK(v == doctest::Approx(95.3));
  }
  const std::vector<double> ramp{1, 2, 3, 4, 5};
  CHECK(moving_average(ramp, 1) == ramp);
  CHECK(moving_average(ramp, 2).size() == 4);

  bool short_flag = false;
  CHECK(moving_average(ramp, 10, &short_flag).empty());
  CHECK(short_flag);
  CHECK_THROWS_AS(moving_average(ramp, 0), PreconditionError);
}

TEST_CASE("moving average of an impulse") {
  std::vector<double> impulse(30, 0.0);
  impulse[12] = 1.0;
  const auto ma = moving_average(impulse, 10);
  REQUIRE(ma.size() == 21);
  // Output i covers inputs i .. i + 9.
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const bool covered = i <= 12 && 12 <= i + 9;
    CHECK(ma[i] == doctest::Approx(covered ? 0.1 : 0.0));
  }
}

TEST_CASE("moving average matches direct convolution and commutes with affine maps") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(95.0, 2.0);
  std::vector<double> x(500);
  for (auto &v : x) {
    v = n(rng);
  }
  const std::size_t w = 10;
  const auto ma = moving_average(x, w);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 3.0 * x[i] - 7.0;
  }
  const auto may = moving_average(y, w);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    double conv = 0.0;
    for (std::size_t k = 0; k < w; ++k) {
      conv += x[i + w - 1 - k] / double(w);
    }
    CHECK(ma[i] == doctest::Approx(conv).epsilon(1e-12));
    CHECK(may[i] == doctest::Approx(3.0 * ma[i] - 7.0).epsilon(1e-12));
  }
}

TEST_CASE("run statistics") {
  const std::vector<double> flat(10, 95.3);
  const auto s = run_statistics(flat);
  CHECK(s.max == 95.3);
  CHECK(s.min == 95.3);
  CHECK(s.mean == 95.3);
  CHECK(s.std == doctest::Approx(0.0));

  const std::vector<double> two{0.0, 100.0};
  const auto t = run_statistics(two);
  CHECK(t.mean == 50.0);
  CHECK(t.std == 50.0);

  CHECK_THROWS_AS(run_statistics(std::vector<double>{}), PreconditionError);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50, 100);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(1 + k);
    for (auto &v : x) {
      v = u(rng);
    }
    const auto r = run_statistics(x);
    CHECK(r.min <= r.mean);
    CHECK(r.mean <= r.max);
    CHECK(r.std >= 0.0);
  }
}
