#include "sagnac/experiments.hpp"
#include "sagnac/noise.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

using namespace sagnac;

namespace {

const std::string kScenarios = std::string(SAGNAC_SOURCE_DIR) + "/scenarios/";

Scenario paired(const std::string &variant, std::size_t samples = 2000) {
  Scenario s = load_scenario(kScenarios + "drift_comparison.json", variant);
  s.samples = samples;
  return s;
}

std::vector<double> column(const std::string &csv, std::size_t col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) {
      std::getline(row, cell, ',');
    }
    out.push_back(cell.empty() ? std::nan("") : std::stod(cell));
  }
  return out;
}

std::vector<double> net_series(const RunOutput &r) {
  std::vector<double> v;
  for (const auto &x : r.series) {
    v.push_back(x.net);
  }
  return v;
}

} // namespace

TEST_CASE("shipped scenario file") {
  const auto names = scenario_variants(kScenarios + "drift_comparison.json");
  CHECK(names == std::vector<std::string>{"modified", "standard"});
  CHECK_THROWS_AS(load_scenario(kScenarios + "drift_comparison.json"), ConfigError);
  CHECK_THROWS_AS(load_scenario(kScenarios + "drift_comparison.json", "other"), ConfigError);
  CHECK_THROWS_AS(load_scenario(kScenarios + "budget.json", "modified"), ConfigError);
  const Scenario s = paired("modified");
  CHECK(s.setup == Setup::Modified);
  CHECK(s.spd1.dark_rate_hz == 244.0);
  CHECK(s.spd0.dark_rate_hz == 153.0);
  CHECK(s.pbs.eta == doctest::Approx(0.0156).epsilon(1e-3));
}

TEST_CASE("scenario JSON round trip and hash") {
  const Scenario s = paired("standard");
  const Scenario back = Scenario::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(back.hash() == s.hash());
  Scenario other = s;
  other.xi = 0.96;
  CHECK(other.hash() != s.hash());
  const Scenario net = load_scenario(kScenarios + "network.json");
  CHECK(Scenario::from_json(net.to_json()).hash() == net.hash());
}

TEST_CASE("configuration errors") {
  auto j = paired("modified").to_json();
  auto bad = j;
  bad["alignment"]["xi"] = 1.5;
  CHECK_THROWS_AS(Scenario::from_json(bad).validate(), ConfigError);
  bad = j;
  bad["colour"] = "blue";
  CHECK_THROWS_AS(Scenario::from_json(bad), ConfigError);
  bad = j;
  bad["setup"] = "triangle";
  CHECK_THROWS_AS(Scenario::from_json(bad), ConfigError);
  bad = j;
  bad["detectors"]["spd0"].erase("dark_rate_hz");
  CHECK_THROWS_AS(Scenario::from_json(bad), ConfigError);
  bad = j;
  bad["samples"] = 0;
  CHECK_THROWS_AS(Scenario::from_json(bad).validate(), ConfigError);
  bad = j;
  bad["target_count_rate_hz"] = 2e6;
  CHECK_THROWS_AS(Scenario::from_json(bad).validate(), ConfigError);
  bad = j;
  bad["setup"] = "network";
  CHECK_THROWS_AS(Scenario::from_json(bad).validate(), ConfigError);
}

TEST_CASE("runs are reproducible from the seed") {
  const Scenario s = paired("modified", 300);
  const auto a = run_drift_experiment(s), b = run_drift_experiment(s);
  REQUIRE(a.series.size() == 300);
  bool same = true;
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    same = same && a.series[i].spd1_hz == b.series[i].spd1_hz && a.series[i].spd0_hz == b.series[i].spd0_hz;
  }
  CHECK(same);
  CHECK(a.seed == s.seed);
  CHECK(a.config_hash == s.hash());

  Scenario t = s;
  t.seed += 1;
  const auto c = run_drift_experiment(t);
  bool differs = false;
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    differs = differs || a.series[i].spd1_hz != c.series[i].spd1_hz;
  }
  CHECK(differs);
}

TEST_CASE("CSV output reproduces the summary statistics") {
  const auto r = run_drift_experiment(paired("standard", 500));
  std::ostringstream os;
  r.write_csv(os);
  const auto net = column(os.str(), 4);
  const auto ma = column(os.str(), 5);
  REQUIRE(net.size() == 500);
  const auto st = defined_statistics(net);
  CHECK(st.mean == r.net_stats.mean);
  CHECK(st.std == r.net_stats.std);
  CHECK(st.min == r.net_stats.min);
  CHECK(st.max == r.net_stats.max);
  const auto mst = defined_statistics(ma);
  CHECK(mst.mean == r.net_ma_stats.mean);
  CHECK(mst.std == r.net_ma_stats.std);
  CHECK(std::isnan(ma[0]));
  CHECK_FALSE(std::isnan(ma[9]));

  const auto summary = r.summary(paired("standard", 500));
  CHECK(summary["net_vis"]["mean"].get<double>() == r.net_stats.mean);
  CHECK(summary["seed"].get<std::uint64_t>() == 20240611);
}

TEST_CASE("detector counts carry the calibrated rate") {
  const auto r = run_drift_experiment(paired("modified", 200));
  const double first = r.series.front().spd1_hz;
  CHECK(std::abs(first - 7000.0) < 5 * std::sqrt(7000.0));
  for (const auto &x : r.series) {
    CHECK(x.dark1_hz == 244.0);
    CHECK(x.dark0_hz == 153.0);
    CHECK(x.net >= -1.0);
    CHECK(x.net <= 1.0);
  }
}

TEST_CASE("moving average smooths the series") {
  for (const char *v : {"standard", "modified"}) {
    const auto r = run_drift_experiment(paired(v, 3000));
    CHECK(r.net_ma_stats.std <= r.net_stats.std);
    CHECK(r.net_ma.size() == 3000 - 9);
  }
}

TEST_CASE("modified setup is insensitive to the drift rate") {
  std::vector<double> means;
  for (double sigma : {0.005, 0.05, 0.3}) {
    Scenario s = paired("modified", 2000);
    s.polarization_sigma = sigma;
    const auto r = run_drift_experiment(s);
    means.push_back(r.net_stats.mean);
    CHECK(r.net_stats.std < 0.01);
  }
  CHECK(std::abs(means[0] - means[1]) < 0.005);
  CHECK(std::abs(means[1] - means[2]) < 0.005);
}

TEST_CASE("standard setup wanders more as the drift speeds up") {
  double prev = -1.0;
  for (double sigma : {0.0, 0.002, 0.05}) {
    Scenario s = paired("standard", 2000);
    s.polarization_sigma = sigma;
    const double sd = run_drift_experiment(s).net_stats.std;
    CHECK(sd > prev);
    prev = sd;
  }
  CHECK(prev > 0.2);
}

TEST_CASE("a common phase walk leaves every sample unchanged") {
  Scenario s = paired("modified", 500);
  s.phase_sigma = 0.0;
  const auto quiet = net_series(run_drift_experiment(s));
  s.phase_sigma = 0.7;
  const auto noisy = net_series(run_drift_experiment(s));
  CHECK(quiet == noisy);
}

TEST_CASE("comparison of the two setups") {
  const auto c = compare_setups(paired("standard", 3000), paired("modified", 3000));
  CHECK(c.modified.net_stats.std < c.standard.net_stats.std);
  CHECK(c.modified.net_stats.mean > c.standard.net_stats.mean);
  const auto tab = c.table();
  REQUIRE(tab.size() == 2);
  CHECK(tab[1]["setup"] == "Modified Sagnac");
  CHECK(tab[1]["std"].get<double>() == doctest::Approx(100 * c.modified.net_stats.std));
  CHECK(c.render().find("Modified") != std::string::npos);

  Scenario other = paired("modified", 3000);
  other.seed = 1;
  CHECK_THROWS_AS(compare_setups(paired("standard", 3000), other), ConfigError);
  CHECK_THROWS_AS(compare_setups(paired("standard", 3000), paired("modified", 2000)), ConfigError);
  CHECK_THROWS_AS(compare_setups(paired("modified", 3000), paired("modified", 3000)), ConfigError);
}

TEST_CASE("budget report") {
  const Scenario s = load_scenario(kScenarios + "budget.json");
  const auto b = run_budget(s);
  CHECK(b["rayleigh_visibility"].get<double>() == doctest::Approx(0.9861).epsilon(1e-4));
  CHECK(b["misalignment_visibility"].get<double>() == doctest::Approx(0.9866).epsilon(1e-4));
  CHECK(b["combined_visibility"].get<double>() < 0.9861);

  Scenario clean = s;
  clean.fiber_a.backscatter_per_km = clean.fiber_b.backscatter_per_km = 0.0;
  CHECK(run_budget(clean)["rayleigh_visibility"].get<double>() == 1.0);
  Scenario aligned = s;
  aligned.xi = 1.0;
  CHECK(run_budget(aligned)["misalignment_visibility"].get<double>() == 1.0);
}

TEST_CASE("network scenario") {
  const Scenario s = load_scenario(kScenarios + "network.json");
  CHECK(s.setup == Setup::Network);
  Scenario short_run = s;
  short_run.samples = 500;
  const auto r = run_drift_experiment(short_run);
  CHECK(r.net_stats.mean > 0.94);
  CHECK(r.net_stats.std < 0.01);

  const auto report = route_report(*s.topology, "Emily", "Frank");
  CHECK(report.dump().find("SW_F") != std::string::npos);
}

TEST_CASE("fringe scan") {
  const auto scan = run_fringe(paired("modified"), 32);
  CHECK(scan.size() == 32);
  const double v = fit_fringe_visibility(scan);
  CHECK(v > 0.8);
  CHECK(v <= 1.0);
  CHECK_THROWS_AS(run_fringe(paired("standard")), ConfigError);
  CHECK_THROWS_AS(run_fringe(paired("modified"), 2), ConfigError);
}
