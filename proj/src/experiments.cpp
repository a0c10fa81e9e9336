#include "sagnac/experiments.hpp"

#include "sagnac/noise.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace sagnac {

using nlohmann::json;

namespace {

constexpr const char *kVersion = "sagnac 1.0.0";

const char *setup_name(Setup s) {
  switch (s) {
  case Setup::Standard:
    return "standard";
  case Setup::Modified:
    return "modified";
  case Setup::Network:
    return "network";
  }
  return "";
}

DetectorParams detector_from_json(const json &j, const char *which) {
  if (!j.contains("dark_rate_hz")) {
    throw ConfigError(std::string("detectors.") + which + ".dark_rate_hz must be given explicitly");
  }
  DetectorParams p;
  p.efficiency = j.value("efficiency", p.efficiency);
  p.dark_rate_hz = j.at("dark_rate_hz").get<double>();
  p.gate_rate_hz = j.value("gate_rate_hz", p.gate_rate_hz);
  p.gate_width_s = j.value("gate_width_s", p.gate_width_s);
  p.deadtime_s = j.value("deadtime_s", p.deadtime_s);
  p.dark_scales_with_duty = j.value("dark_scales_with_duty", p.dark_scales_with_duty);
  return p;
}

json detector_to_json(const DetectorParams &p) {
  return {{"efficiency", p.efficiency},     {"dark_rate_hz", p.dark_rate_hz}, {"gate_rate_hz", p.gate_rate_hz},
          {"gate_width_s", p.gate_width_s}, {"deadtime_s", p.deadtime_s},
          {"dark_scales_with_duty", p.dark_scales_with_duty}};
}

json stats_to_json(const RunStats &s) { return {{"max", s.max}, {"min", s.min}, {"mean", s.mean}, {"std", s.std}}; }

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

Scenario Scenario::from_json(const json &j) {
  static const std::set<std::string> known{"name",
                                           "setup",
                                           "seed",
                                           "samples",
                                           "acquisition_rate_hz",
                                           "moving_average",
                                           "fibers",
                                           "pbs",
                                           "alignment",
                                           "component_loss_db",
                                           "coherence_time_s",
                                           "drift",
                                           "detectors",
                                           "target_count_rate_hz",
                                           "rayleigh",
                                           "background",
                                           "network"};
  if (!j.is_object()) {
    throw ConfigError("scenario must be a JSON object");
  }
  for (const auto &[key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown scenario key '" + key + "'");
    }
  }
  Scenario s;
  try {
    s.name = j.value("name", std::string{});
    const std::string setup = j.value("setup", std::string{"modified"});
    if (setup == "standard") {
      s.setup = Setup::Standard;
    } else if (setup == "modified") {
      s.setup = Setup::Modified;
    } else if (setup == "network") {
      s.setup = Setup::Network;
    } else {
      throw ConfigError("setup must be standard, modified or network, got '" + setup + "'");
    }
    s.seed = j.value("seed", s.seed);
    s.samples = j.value("samples", s.samples);
    s.acquisition_rate_hz = j.value("acquisition_rate_hz", s.acquisition_rate_hz);
    s.moving_average_window = j.value("moving_average", s.moving_average_window);
    if (j.contains("fibers")) {
      const auto &f = j.at("fibers");
      if (f.contains("a")) {
        s.fiber_a = fiber_from_json(f.at("a"));
      }
      if (f.contains("b")) {
        s.fiber_b = fiber_from_json(f.at("b"));
      }
    }
    if (j.contains("pbs")) {
      const auto &p = j.at("pbs");
      const double il = p.value("insertion_loss_db", 0.0);
      if (p.contains("extinction_db")) {
        s.pbs = PBSSpec::from_extinction_db(p.at("extinction_db").get<double>(), il);
      } else {
        s.pbs = PBSSpec{p.value("eta", 0.0), il};
      }
    }
    if (j.contains("alignment")) {
      s.xi = j.at("alignment").value("xi", s.xi);
    }
    s.component_loss_db = j.value("component_loss_db", s.component_loss_db);
    s.coherence_time_s = j.value("coherence_time_s", s.coherence_time_s);
    if (j.contains("drift")) {
      const auto &d = j.at("drift");
      s.polarization_sigma = d.value("polarization_sigma", s.polarization_sigma);
      s.phase_sigma = d.value("phase_sigma", s.phase_sigma);
      s.in_flight_sigma = d.value("in_flight_sigma", s.in_flight_sigma);
    }
    if (!j.contains("detectors")) {
      throw ConfigError("detectors.spd1 and detectors.spd0 are required");
    }
    s.spd1 = detector_from_json(j.at("detectors").at("spd1"), "spd1");
    s.spd0 = detector_from_json(j.at("detectors").at("spd0"), "spd0");
    s.target_count_rate_hz = j.value("target_count_rate_hz", s.target_count_rate_hz);
    s.rayleigh = j.value("rayleigh", s.rayleigh);
    const std::string bg = j.value("background", std::string{"closed_form"});
    if (bg == "closed_form") {
      s.background = BackgroundModel::ClosedForm;
    } else if (bg == "traced") {
      s.background = BackgroundModel::Traced;
    } else {
      throw ConfigError("background must be closed_form or traced, got '" + bg + "'");
    }
    if (j.contains("network")) {
      const auto &n = j.at("network");
      if (n.contains("topology")) {
        s.topology = Topology::from_json(n.at("topology"));
      }
      if (n.contains("users")) {
        const auto users = n.at("users").get<std::vector<std::string>>();
        if (users.size() != 2) {
          throw ConfigError("network.users must name exactly two users");
        }
        s.user1 = users[0];
        s.user2 = users[1];
      }
      if (n.contains("switches")) {
        s.switches = n.at("switches").get<SwitchConfig>();
      }
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

json Scenario::to_json() const {
  json j{{"name", name},
         {"setup", setup_name(setup)},
         {"seed", seed},
         {"samples", samples},
         {"acquisition_rate_hz", acquisition_rate_hz},
         {"moving_average", moving_average_window},
         {"fibers", {{"a", fiber_to_json(fiber_a)}, {"b", fiber_to_json(fiber_b)}}},
         {"pbs", {{"eta", pbs.eta}, {"insertion_loss_db", pbs.insertion_loss_db}}},
         {"alignment", {{"xi", xi}}},
         {"component_loss_db", component_loss_db},
         {"coherence_time_s", coherence_time_s},
         {"drift",
          {{"polarization_sigma", polarization_sigma},
           {"phase_sigma", phase_sigma},
           {"in_flight_sigma", in_flight_sigma}}},
         {"detectors", {{"spd1", detector_to_json(spd1)}, {"spd0", detector_to_json(spd0)}}},
         {"target_count_rate_hz", target_count_rate_hz},
         {"rayleigh", rayleigh},
         {"background", background == BackgroundModel::ClosedForm ? "closed_form" : "traced"}};
  if (setup == Setup::Network) {
    json n{{"users", {user1, user2}}, {"switches", switches}};
    if (topology) {
      n["topology"] = topology->to_json();
    }
    j["network"] = n;
  }
  return j;
}

void Scenario::validate() const {
  if (samples == 0) {
    throw ConfigError("samples must be >= 1");
  }
  if (!(acquisition_rate_hz > 0.0)) {
    throw ConfigError("acquisition_rate_hz must be positive");
  }
  if (moving_average_window == 0) {
    throw ConfigError("moving_average must be >= 1");
  }
  if (!(xi > 0.0 && xi <= 1.0)) {
    throw ConfigError("alignment.xi must lie in (0, 1]");
  }
  if (!(pbs.eta >= 0.0 && pbs.eta < 0.5)) {
    throw ConfigError("pbs extinction fraction must lie in [0, 0.5)");
  }
  if (!(component_loss_db >= 0.0 && coherence_time_s >= 0.0)) {
    throw ConfigError("component_loss_db and coherence_time_s must be >= 0");
  }
  if (!(polarization_sigma >= 0.0 && phase_sigma >= 0.0 && in_flight_sigma >= 0.0)) {
    throw ConfigError("drift magnitudes must be >= 0");
  }
  if (!(target_count_rate_hz > 0.0)) {
    throw ConfigError("target_count_rate_hz must be positive");
  }
  try {
    spd1.validate();
    spd0.validate();
  } catch (const PreconditionError &e) {
    throw ConfigError(e.what());
  }
  if (spd1.deadtime_s > 0.0 && target_count_rate_hz * spd1.deadtime_s >= 1.0) {
    throw ConfigError("target_count_rate_hz exceeds the SPD1 dead-time limit");
  }
  if (setup == Setup::Network) {
    if (!topology) {
      throw ConfigError("network setup needs network.topology");
    }
    if (user1.empty() || user2.empty()) {
      throw ConfigError("network setup needs network.users");
    }
  } else if (fiber_a.length_km + fiber_b.length_km <= 0.0) {
    throw ConfigError("fibers.a and fibers.b must have a positive total length");
  }
}

std::uint64_t Scenario::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

json read_json(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open " + file.string());
  }
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception &e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

} // namespace

std::vector<std::string> scenario_variants(const std::string &path) {
  const json j = read_json(path);
  std::vector<std::string> out;
  if (j.contains("common")) {
    for (const auto &[key, value] : j.items()) {
      if (key != "common") {
        out.push_back(key);
      }
    }
  }
  return out;
}

Scenario load_scenario(const std::string &path, const std::string &variant) {
  json j = read_json(path);
  if (j.contains("common")) {
    if (variant.empty() || !j.contains(variant) || variant == "common") {
      std::string names;
      for (const auto &v : scenario_variants(path)) {
        names += (names.empty() ? "" : ", ") + v;
      }
      throw ConfigError(path + " holds several scenarios; choose one of: " + names);
    }
    json merged = j.at("common");
    merged.merge_patch(j.at(variant));
    j = merged;
  } else if (!variant.empty()) {
    throw ConfigError(path + " holds a single scenario; no variant '" + variant + "'");
  }
  if (j.contains("network") && j["network"].contains("topology_file")) {
    const auto file = std::filesystem::path(path).parent_path() / j["network"]["topology_file"].get<std::string>();
    j["network"]["topology"] = read_json(file);
    j["network"].erase("topology_file");
  }
  return Scenario::from_json(j);
}

namespace {

enum Stream : std::uint32_t { kStart = 1, kDrift = 2, kPhase = 3, kDetect = 4, kInFlight = 5 };

std::uint64_t stream_seed(std::uint64_t seed, std::uint32_t stream, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, index};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double length_weighted(const std::vector<const FiberChannel *> &fibers, double FiberChannel::*field) {
  double num = 0.0, len = 0.0;
  for (const auto *f : fibers) {
    num += f->*field * f->length_km;
    len += f->length_km;
  }
  return len > 0.0 ? num / len : 0.0;
}

std::vector<FiberChannel *> arm_fibers(Arm &arm) {
  std::vector<FiberChannel *> out;
  for (auto &e : arm.elements) {
    if (auto *f = std::get_if<FiberChannel>(&e)) {
      out.push_back(f);
    }
  }
  return out;
}

// Mutable simulation state of one interferometer during a drift run.
class Rig {
public:
  explicit Rig(const Scenario &s) : s_(s), phase_rng_(stream_seed(s.seed, kPhase)), flight_rng_(stream_seed(s.seed, kInFlight)) {
    if (s.setup == Setup::Standard) {
      loop_ = compose_fibers({s.fiber_a, s.fiber_b});
      if (loop_.length_km > 0.0) {
        loop_.attenuation_db_per_km += s.component_loss_db / loop_.length_km;
      }
      fibers_.push_back(&loop_);
      rayleigh_fibers_ = {&s.fiber_a, &s.fiber_b};
    } else {
      if (s.setup == Setup::Modified) {
        state_ = make_three_node(s.fiber_a, s.fiber_b, s.pbs, s.xi);
      } else {
        SwitchConfig c = s.switches;
        if (c.empty()) {
          c = resolve_connection(*s.topology, s.user1, s.user2).front();
        }
        route_ = validate_route(*s.topology, c, s.user1, s.user2);
        state_ = build_interferometer(*s.topology, route_, s.pbs, s.xi);
      }
      if (s.component_loss_db > 0.0) {
        // Every pulse crosses arm a twice.
        state_.arm_a.elements.push_back(DelayLine{"components", 0.0, s.component_loss_db / 2.0});
      }
      state_.coherence_time_s = s.coherence_time_s;
      for (Arm *arm : {&state_.arm_a, &state_.arm_b}) {
        const auto fs = arm_fibers(*arm);
        double t2 = 1.0;
        for (auto *f : fs) {
          fibers_.push_back(f);
          rayleigh_fibers_.push_back(f);
          t2 *= f->transmission() * f->transmission();
        }
        arm_round_trip_.push_back(t2);
      }
      std::uint32_t k = 0;
      for (auto *f : fibers_) {
        f->unitary = random_unitary(stream_seed(s.seed, kStart, k++));
      }
      align_controllers(state_);
    }
    std::uint32_t k = 0;
    for (auto *f : fibers_) {
      drift_.emplace_back(s.polarization_sigma, stream_seed(s.seed, kDrift, k++), f->unitary);
    }
    for (const auto *f : rayleigh_fibers_) {
      rayleigh_length_ += f->length_km;
    }
    rayleigh_gamma_ = length_weighted(rayleigh_fibers_, &FiberChannel::backscatter_per_km);
    rayleigh_alpha_ = np_from_db(length_weighted(rayleigh_fibers_, &FiberChannel::attenuation_db_per_km));
  }

  Rig(const Rig &) = delete;
  Rig &operator=(const Rig &) = delete;

  void advance() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < fibers_.size(); ++i) {
      fibers_[i]->unitary = drift_[i].step();
      if (s_.phase_sigma > 0.0) {
        fibers_[i]->phase = wrap_phase(fibers_[i]->phase + s_.phase_sigma * gauss(phase_rng_));
      }
    }
    if (s_.in_flight_sigma > 0.0) {
      for (auto *f : fibers_) {
        std::array<double, 3> axis{gauss(flight_rng_), gauss(flight_rng_), gauss(flight_rng_)};
        const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        for (double &x : axis) {
          x /= n;
        }
        f->return_unitary = su2_rotation(axis, s_.in_flight_sigma * gauss(flight_rng_)) * f->unitary;
      }
    }
  }

  /// Relative optical powers at SPD1 and SPD0.
  std::array<double, 2> powers() const {
    TraceResult r;
    double launch = 0.0;
    double misalignment = 0.0;
    if (s_.setup == Setup::Standard) {
      r = trace_standard_sagnac(loop_, JonesVector::horizontal(), s_.coherence_time_s);
      launch = r.injected;
    } else {
      r = trace_modified_sagnac(state_);
      launch = r.arm_launch[0] + r.arm_launch[1];
      const AlignmentBudget b{s_.xi, s_.pbs.eta};
      for (double t2 : arm_round_trip_) {
        misalignment += misalignment_powers(b, 0.5 * r.injected, t2).noise;
      }
    }
    const double pr = s_.rayleigh && rayleigh_gamma_ > 0.0
                          ? rayleigh_power(launch, rayleigh_gamma_, rayleigh_alpha_, rayleigh_length_)
                          : 0.0;
    if (s_.background == BackgroundModel::ClosedForm) {
      // The budget counts the whole background against the signal,
      // V = (S - B) / (S + B); the dark port carries it here.
      return {r.signal_spd1, r.signal_spd0 + misalignment + pr};
    }
    return {r.spd1 + pr / 2.0, r.spd0 + pr / 2.0};
  }

  const InterferometerState &state() const { return state_; }

private:
  const Scenario &s_;
  FiberChannel loop_;
  InterferometerState state_;
  Route route_;
  std::vector<FiberChannel *> fibers_;
  std::vector<const FiberChannel *> rayleigh_fibers_;
  std::vector<DriftProcess> drift_;
  std::vector<double> arm_round_trip_;
  double rayleigh_length_{0.0}, rayleigh_gamma_{0.0}, rayleigh_alpha_{0.0};
  std::mt19937_64 phase_rng_, flight_rng_;
};

double effective_dark(const DetectorParams &p) {
  return p.dark_scales_with_duty ? p.dark_rate_hz * p.duty_cycle() : p.dark_rate_hz;
}

double value_or_nan(const Visibility &v) { return v.defined ? v.value : std::numeric_limits<double>::quiet_NaN(); }

} // namespace

RunStats defined_statistics(const std::vector<double> &series) {
  std::vector<double> defined;
  defined.reserve(series.size());
  for (double x : series) {
    if (!std::isnan(x)) {
      defined.push_back(x);
    }
  }
  if (defined.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan};
  }
  return run_statistics(defined);
}

RunOutput run_drift_experiment(const Scenario &s) {
  s.validate();
  Rig rig(s);
  std::mt19937_64 detect_rng(stream_seed(s.seed, kDetect));

  RunOutput out;
  out.seed = s.seed;
  out.config_hash = s.hash();
  out.series.reserve(s.samples);

  const double duration = 1.0 / s.acquisition_rate_hz;
  const double d1 = effective_dark(s.spd1), d0 = effective_dark(s.spd0);
  std::vector<double> raw, net;
  raw.reserve(s.samples);
  net.reserve(s.samples);

  for (std::size_t i = 0; i < s.samples; ++i) {
    if (i > 0) {
      rig.advance();
    }
    const auto p = rig.powers();
    if (i == 0) {
      // Virtual attenuator set once so the bright port starts at the target rate.
      if (!(p[0] > 0.0)) {
        throw ConfigError("no light reaches SPD1 at the start of the run; cannot calibrate the count rate");
      }
      out.photon_scale = photon_rate_for_registered(s.target_count_rate_hz, s.spd1) / p[0];
    }
    VisibilityRecord rec;
    rec.timestamp_s = static_cast<double>(i) * duration;
    rec.spd1_hz = static_cast<double>(detect(out.photon_scale * p[0], s.spd1, duration, detect_rng)) / duration;
    rec.spd0_hz = static_cast<double>(detect(out.photon_scale * p[1], s.spd0, duration, detect_rng)) / duration;
    rec.dark1_hz = d1;
    rec.dark0_hz = d0;
    rec.raw = value_or_nan(raw_visibility(rec.spd1_hz, rec.spd0_hz));
    rec.net = value_or_nan(net_visibility(rec.spd1_hz, rec.spd0_hz, d1, d0));
    raw.push_back(rec.raw);
    net.push_back(rec.net);
    out.series.push_back(rec);
  }
  out.net_ma = moving_average(net, s.moving_average_window);
  out.raw_stats = defined_statistics(raw);
  out.net_stats = defined_statistics(net);
  out.net_ma_stats = defined_statistics(out.net_ma);
  return out;
}

void RunOutput::write_csv(std::ostream &os) const {
  os << "timestamp_s,spd1_hz,spd0_hz,raw_vis,net_vis,net_vis_ma\n";
  const std::size_t lag = series.size() - net_ma.size();
  char buf[64];
  auto field = [&](double v) {
    if (std::isnan(v)) {
      return std::string{};
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto &r = series[i];
    os << field(r.timestamp_s) << ',' << field(r.spd1_hz) << ',' << field(r.spd0_hz) << ',' << field(r.raw) << ','
       << field(r.net) << ',';
    if (i >= lag) {
      os << field(net_ma[i - lag]);
    }
    os << '\n';
  }
}

json RunOutput::summary(const Scenario &s) const {
  return {{"version", kVersion},
          {"seed", seed},
          {"config_hash", hex64(config_hash)},
          {"samples", series.size()},
          {"photon_scale", photon_scale},
          {"raw_vis", stats_to_json(raw_stats)},
          {"net_vis", stats_to_json(net_stats)},
          {"net_vis_ma", stats_to_json(net_ma_stats)},
          {"scenario", s.to_json()}};
}

json run_budget(const Scenario &s) {
  s.validate();
  std::vector<const FiberChannel *> fibers{&s.fiber_a, &s.fiber_b};
  double length = 0.0;
  for (const auto *f : fibers) {
    length += f->length_km;
  }
  const double alpha = np_from_db(length_weighted(fibers, &FiberChannel::attenuation_db_per_km));
  const double gamma = length_weighted(fibers, &FiberChannel::backscatter_per_km);
  ChannelBudget c;
  c.length_km = length;
  c.alpha_np_per_km = alpha;
  c.gamma_per_km = gamma;
  c.t = std::exp(-alpha * length);
  const double t2 = c.t * c.t * db_to_fraction(s.component_loss_db);
  const AlignmentBudget b{s.xi, s.pbs.eta};
  bool warn = false;
  PowerBudget pb;
  const double combined = combined_budget(c, b, t2, &pb);
  json out{{"inputs",
            {{"length_km", length},
             {"alpha_np_per_km", alpha},
             {"gamma_per_km", gamma},
             {"t", c.t},
             {"full_path_transmission", t2},
             {"xi", s.xi},
             {"eta", s.pbs.eta},
             {"extinction_db", s.pbs.eta > 0.0 ? s.pbs.extinction_ratio_db() : std::numeric_limits<double>::infinity()}}},
           {"rayleigh_visibility", rayleigh_visibility(c.t, gamma, alpha)},
           {"misalignment_visibility", misalignment_visibility(t2, b, &warn)},
           {"combined_visibility", combined},
           {"powers", {{"rayleigh", pb.rayleigh}, {"misalignment_noise", pb.noise}, {"signal", pb.signal}}},
           {"approximation_warning", warn}};
  return out;
}

Comparison compare_setups(const Scenario &standard, const Scenario &modified) {
  if (standard.setup != Setup::Standard || modified.setup == Setup::Standard) {
    throw ConfigError("compare needs a standard and a modified (or network) scenario");
  }
  if (standard.samples != modified.samples || standard.acquisition_rate_hz != modified.acquisition_rate_hz) {
    throw ConfigError("compare: run durations differ");
  }
  if (standard.seed != modified.seed || standard.polarization_sigma != modified.polarization_sigma ||
      standard.phase_sigma != modified.phase_sigma) {
    throw ConfigError("compare: seed and drift magnitudes must match");
  }
  return {run_drift_experiment(standard), run_drift_experiment(modified)};
}

json Comparison::table() const {
  auto row = [](const char *name, const RunOutput &o) {
    return json{{"setup", name},
                {"max", 100.0 * o.net_stats.max},
                {"min", 100.0 * o.net_stats.min},
                {"avg", 100.0 * o.net_stats.mean},
                {"std", 100.0 * o.net_stats.std}};
  };
  return json::array({row("Standard Sagnac", standard), row("Modified Sagnac", modified)});
}

std::string Comparison::render() const {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s %8s\n", "Net vis. (%)", "Max", "Min", "Avg", "Std");
  os << buf;
  for (const auto &r : table()) {
    std::snprintf(buf, sizeof buf, "%-16s %8.3f %8.3f %8.3f %8.3f\n", r["setup"].get<std::string>().c_str(),
                  r["max"].get<double>(), r["min"].get<double>(), r["avg"].get<double>(), r["std"].get<double>());
    os << buf;
  }
  return os.str();
}

std::vector<FringePoint> run_fringe(const Scenario &s, std::size_t points) {
  s.validate();
  if (s.setup == Setup::Standard) {
    throw ConfigError("fringe scans need the modulators of the modified or network setup");
  }
  if (points < 3) {
    throw ConfigError("fringe scans need at least 3 points");
  }
  Rig rig(s);
  std::vector<double> deltas;
  for (std::size_t i = 0; i < points; ++i) {
    deltas.push_back(2.0 * kPi * static_cast<double>(i) / static_cast<double>(points));
  }
  return interference_fringe(rig.state(), deltas);
}

json route_report(const Topology &t, const std::string &u1, const std::string &u2) {
  json configs = json::array();
  for (const auto &c : resolve_connection(t, u1, u2)) {
    const Route r = validate_route(t, c, u1, u2);
    configs.push_back({{"switches", c},
                       {"same_branch", r.same_branch},
                       {"pulse_port1", r.pulse_port1},
                       {"pulse_port2", r.pulse_port2}});
  }
  return {{"users", {u1, u2}}, {"configurations", configs}};
}

} // namespace sagnac
