#include "sagnac/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace sagnac;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
};

void add_overrides(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--samples", o.samples, "Override the number of samples")->check(CLI::PositiveNumber);
}

Scenario load(const std::string &path, const std::string &variant, const Overrides &o) {
  Scenario s = load_scenario(path, variant);
  if (o.seed) {
    s.seed = *o.seed;
  }
  if (o.samples) {
    s.samples = *o.samples;
  }
  s.validate();
  return s;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path);
  if (!f) {
    throw ConfigError("cannot write " + path);
  }
  return f;
}

void write_run(const std::string &prefix, const Scenario &s, const RunOutput &r) {
  auto csv = open_out(prefix + ".csv");
  r.write_csv(csv);
  auto sum = open_out(prefix + ".summary.json");
  sum << r.summary(s).dump(2) << '\n';
}

void print_stats(const char *label, const RunStats &st) {
  std::printf("%-10s max %7.3f  min %7.3f  avg %7.3f  std %7.3f  (%%)\n", label, 100 * st.max, 100 * st.min,
              100 * st.mean, 100 * st.std);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sagnac interferometer simulator"};
  app.require_subcommand(1);

  std::string scenario, variant, out;
  Overrides ov;

  auto *run = app.add_subcommand("run", "Drift experiment");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--setup", variant, "Scenario to use from a multi-scenario file");
  std::string run_out = "run";
  run->add_option("--out", run_out, "Output prefix for CSV and summary");
  add_overrides(run, ov);

  auto *budget = app.add_subcommand("budget", "Closed-form visibility budget");
  budget->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  budget->add_option("--setup", variant, "Scenario to use from a multi-scenario file");
  budget->add_option("--out", out, "Write the report to this file");

  std::string std_variant = "standard", mod_variant = "modified";
  auto *compare = app.add_subcommand("compare", "Standard versus modified drift runs");
  compare->add_option("scenario", scenario, "Scenario file holding both setups")->required()->check(CLI::ExistingFile);
  compare->add_option("--standard", std_variant, "Name of the standard scenario");
  compare->add_option("--modified", mod_variant, "Name of the modified scenario");
  compare->add_option("--out", out, "Output prefix");
  add_overrides(compare, ov);

  std::size_t points = 64;
  auto *fringe = app.add_subcommand("fringe", "Phase scan of the modified interferometer");
  fringe->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  fringe->add_option("--setup", variant, "Scenario to use from a multi-scenario file");
  fringe->add_option("--points", points, "Number of phase steps");
  fringe->add_option("--out", out, "Write the scan as CSV");
  add_overrides(fringe, ov);

  std::string topo, user1, user2;
  auto *route = app.add_subcommand("route", "Switch configurations connecting two users");
  route->add_option("topology", topo, "Topology or network scenario file")->required()->check(CLI::ExistingFile);
  route->add_option("user1", user1)->required();
  route->add_option("user2", user2)->required();
  route->add_option("--out", out, "Write the report to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Scenario s = load(scenario, variant, ov);
      const RunOutput r = run_drift_experiment(s);
      write_run(run_out, s, r);
      print_stats("raw", r.raw_stats);
      print_stats("net", r.net_stats);
      print_stats("net ma", r.net_ma_stats);
      std::printf("wrote %s.csv and %s.summary.json\n", run_out.c_str(), run_out.c_str());
    } else if (*budget) {
      const json report = run_budget(load(scenario, variant, ov));
      if (out.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        open_out(out) << report.dump(2) << '\n';
      }
    } else if (*compare) {
      const Scenario a = load(scenario, std_variant, ov);
      const Scenario b = load(scenario, mod_variant, ov);
      const Comparison c = compare_setups(a, b);
      std::cout << c.render();
      if (!out.empty()) {
        write_run(out + "_standard", a, c.standard);
        write_run(out + "_modified", b, c.modified);
        open_out(out + ".json") << c.table().dump(2) << '\n';
      }
    } else if (*fringe) {
      const auto scan = run_fringe(load(scenario, variant, ov), points);
      std::printf("fitted visibility %.6f\n", fit_fringe_visibility(scan));
      if (!out.empty()) {
        auto f = open_out(out);
        f << "delta_rad,spd1,spd0\n";
        for (const auto &p : scan) {
          f << p.delta << ',' << p.spd1 << ',' << p.spd0 << '\n';
        }
      }
    } else if (*route) {
      std::ifstream in(topo);
      const json j = json::parse(in, nullptr, true, true);
      const Topology t = j.contains("branches") ? Topology::from_json(j) : *load_scenario(topo).topology;
      const json report = route_report(t, user1, user2);
      if (out.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        open_out(out) << report.dump(2) << '\n';
      }
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const RouteError &e) {
    std::cerr << "route error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
