#include "sagnac/network.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace sagnac {

namespace {

std::string input_key(const std::string &sw, int input) { return sw + "(" + std::to_string(input) + ")"; }

std::optional<std::string> lookup(const SwitchConfig &c, const std::string &key) {
  const auto it = c.find(key);
  if (it == c.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::string require(const SwitchConfig &c, const std::string &key) {
  auto v = lookup(c, key);
  if (!v) {
    throw RouteError("incomplete configuration: switch " + key + " must be set");
  }
  return *v;
}

} // namespace

void Topology::validate() const {
  if (branches.empty()) {
    throw ConfigError("topology has no branches");
  }
  std::set<std::string> ids, users, switches{selector_id, branch_switch_id};
  for (const auto &b : branches) {
    if (b.id.empty() || !ids.insert(b.id).second) {
      throw ConfigError("branch ids must be unique and non-empty");
    }
    if (b.stations.empty()) {
      throw ConfigError("branch " + b.id + " has no stations");
    }
    for (std::size_t i = 0; i < b.stations.size(); ++i) {
      const auto &s = b.stations[i];
      if (s.user.empty() || s.user == "Charlie" || !users.insert(s.user).second) {
        throw ConfigError("user names must be unique, non-empty and not 'Charlie'");
      }
      if (!s.switch_id.empty()) {
        if (i + 1 != b.stations.size()) {
          throw ConfigError("only the end station of a branch may own a local switch (" + s.user + ")");
        }
        if (!switches.insert(s.switch_id).second) {
          throw ConfigError("duplicate switch id " + s.switch_id);
        }
      }
      if (!(s.segment.length_km >= 0.0)) {
        throw ConfigError("fiber segment lengths must be >= 0");
      }
    }
  }
  if (!(charlie_odl_s >= 0.0 && switch_loss_db >= 0.0)) {
    throw ConfigError("Charlie's delay line and switch losses must be >= 0");
  }
}

const Branch *Topology::find_branch(const std::string &id) const {
  for (const auto &b : branches) {
    if (b.id == id) {
      return &b;
    }
  }
  return nullptr;
}

std::pair<const Branch *, std::size_t> Topology::locate(const std::string &user) const {
  for (const auto &b : branches) {
    for (std::size_t i = 0; i < b.stations.size(); ++i) {
      if (b.stations[i].user == user) {
        return {&b, i};
      }
    }
  }
  throw RouteError("unknown user " + user);
}

std::vector<std::string> Topology::users() const {
  std::vector<std::string> out;
  for (const auto &b : branches) {
    for (const auto &s : b.stations) {
      out.push_back(s.user);
    }
  }
  return out;
}

FiberChannel fiber_from_json(const nlohmann::json &j) {
  FiberChannel f;
  f.length_km = j.value("length_km", 0.0);
  f.attenuation_db_per_km = j.value("attenuation_db_per_km", 0.2);
  f.backscatter_per_km = j.value("backscatter_per_km", 0.0);
  f.group_index = j.value("group_index", kDefaultGroupIndex);
  if (!(f.length_km >= 0.0 && f.attenuation_db_per_km >= 0.0 && f.backscatter_per_km >= 0.0 && f.group_index > 0.0)) {
    throw ConfigError("fiber parameters must be non-negative");
  }
  return f;
}

nlohmann::json fiber_to_json(const FiberChannel &f) {
  return {{"length_km", f.length_km},
          {"attenuation_db_per_km", f.attenuation_db_per_km},
          {"backscatter_per_km", f.backscatter_per_km},
          {"group_index", f.group_index}};
}

Topology Topology::from_json(const nlohmann::json &j) {
  Topology t;
  try {
    if (j.contains("hub")) {
      const auto &h = j.at("hub");
      t.selector_id = h.value("selector", t.selector_id);
      t.branch_switch_id = h.value("branch_switch", t.branch_switch_id);
      t.charlie_odl_s = h.value("charlie_odl_s", t.charlie_odl_s);
      t.min_charlie_odl_s = h.value("min_charlie_odl_s", t.min_charlie_odl_s);
      t.switch_loss_db = h.value("switch_loss_db", t.switch_loss_db);
    }
    for (const auto &bj : j.at("branches")) {
      Branch b;
      b.id = bj.at("id").get<std::string>();
      for (const auto &sj : bj.at("stations")) {
        Station s;
        s.user = sj.at("user").get<std::string>();
        if (sj.contains("segment")) {
          s.segment = fiber_from_json(sj.at("segment"));
        }
        s.odl_delay_s = sj.value("odl_delay_s", 0.0);
        s.switch_id = sj.value("switch", std::string{});
        b.stations.push_back(std::move(s));
      }
      t.branches.push_back(std::move(b));
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  t.validate();
  return t;
}

nlohmann::json Topology::to_json() const {
  nlohmann::json j;
  j["hub"] = {{"selector", selector_id},
              {"branch_switch", branch_switch_id},
              {"charlie_odl_s", charlie_odl_s},
              {"min_charlie_odl_s", min_charlie_odl_s},
              {"switch_loss_db", switch_loss_db}};
  j["branches"] = nlohmann::json::array();
  for (const auto &b : branches) {
    nlohmann::json bj{{"id", b.id}, {"stations", nlohmann::json::array()}};
    for (const auto &s : b.stations) {
      nlohmann::json sj{{"user", s.user}, {"segment", fiber_to_json(s.segment)}, {"odl_delay_s", s.odl_delay_s}};
      if (!s.switch_id.empty()) {
        sj["switch"] = s.switch_id;
      }
      bj["stations"].push_back(sj);
    }
    j["branches"].push_back(bj);
  }
  return j;
}

Topology example_topology() {
  auto seg = [](double km) {
    FiberChannel f;
    f.length_km = km;
    f.attenuation_db_per_km = 0.2;
    return f;
  };
  Topology t;
  t.charlie_odl_s = 5e-6;
  t.branches = {
      {"a", {{"Alice", seg(10.0), 50e-9, ""}}},
      {"b", {{"Bob", seg(12.0), 50e-9, ""}}},
      {"d", {{"Debbie", seg(8.0), 50e-9, ""}}},
      {"e", {{"Emily", seg(5.0), 50e-9, ""}, {"Frank", seg(3.0), 50e-9, "SW_F"}}},
  };
  t.validate();
  return t;
}

Topology generate_topology(const std::vector<int> &users_per_branch) {
  Topology t;
  int user = 0;
  for (std::size_t b = 0; b < users_per_branch.size(); ++b) {
    Branch br;
    br.id = std::string(1, static_cast<char>('p' + b));
    for (int k = 0; k < users_per_branch[b]; ++k) {
      Station s;
      s.user = "U" + std::to_string(user++);
      s.segment.length_km = 1.0 + k;
      s.segment.attenuation_db_per_km = 0.2;
      s.odl_delay_s = 20e-9;
      br.stations.push_back(std::move(s));
    }
    if (br.stations.size() > 1) {
      br.stations.back().switch_id = "SW_" + br.id;
    }
    t.branches.push_back(std::move(br));
  }
  t.validate();
  return t;
}

namespace {

ArmPath walk_branch(const Topology &t, const Branch &b, const SwitchConfig &c, const std::string &entry,
                    const std::string &u1, const std::string &u2) {
  ArmPath arm;
  arm.branch = b.id;
  arm.hops.push_back(entry);
  for (std::size_t i = 0; i < b.stations.size(); ++i) {
    const Station &s = b.stations[i];
    arm.hops.push_back("fiber:" + b.id + "/" + std::to_string(i));
    const bool terminal = i + 1 == b.stations.size();
    const bool party = s.user == u1 || s.user == u2;
    if (!terminal) {
      arm.hops.push_back("MOD_" + s.user);
      arm.modulating.push_back(&s);
      continue;
    }
    bool through_modulators = true;
    if (!s.switch_id.empty()) {
      auto pos = lookup(c, s.switch_id);
      if (!pos && party) {
        throw RouteError("incomplete configuration: switch " + s.switch_id + " must be set for " + s.user);
      }
      if (pos && *pos != "1" && *pos != "2") {
        throw RouteError("switch " + s.switch_id + " has no port " + *pos);
      }
      through_modulators = pos && *pos == "2";
      arm.hops.push_back(s.switch_id + ":" + (pos ? *pos : "-"));
    }
    if (through_modulators) {
      arm.hops.push_back("MOD_" + s.user);
      arm.modulating.push_back(&s);
    }
    arm.hops.push_back("FM_" + s.user);
    arm.mirror_owner = s.user;
  }
  (void)t;
  return arm;
}

bool carries(const ArmPath &a, const std::string &user) {
  return std::any_of(a.modulating.begin(), a.modulating.end(), [&](const Station *s) { return s->user == user; });
}

} // namespace

Route validate_route(const Topology &t, const SwitchConfig &c, const std::string &u1, const std::string &u2) {
  if (u1 == u2) {
    throw InvalidPairError("a user cannot connect to itself: " + u1);
  }
  t.locate(u1);
  t.locate(u2);

  Route r;
  r.user1 = u1;
  r.user2 = u2;

  const std::string k1 = input_key(t.branch_switch_id, 1), k2 = input_key(t.branch_switch_id, 2);
  const std::string b1 = require(c, k1);
  const Branch *br1 = t.find_branch(b1);
  if (!br1) {
    throw RouteError("unroutable: " + k1 + " has no port " + b1);
  }
  r.arms[0] = walk_branch(t, *br1, c, k1 + ":" + b1, u1, u2);

  const std::string sel = require(c, t.selector_id);
  if (sel == "1") {
    throw RouteError("unroutable: " + t.selector_id + " port 1 is parked (dangling path)");
  } else if (sel == "2") {
    const std::string b2 = require(c, k2);
    const Branch *br2 = t.find_branch(b2);
    if (!br2) {
      throw RouteError("unroutable: " + k2 + " has no port " + b2);
    }
    if (b2 == b1) {
      throw RouteError("unroutable: both inputs of " + t.branch_switch_id + " select branch " + b1);
    }
    r.arms[1] = walk_branch(t, *br2, c, t.selector_id + ":2/" + k2 + ":" + b2, u1, u2);
  } else if (sel == "3") {
    if (t.charlie_odl_s < t.min_charlie_odl_s) {
      std::ostringstream os;
      os << "pulse overlap at FM_Charlie: delay line " << t.charlie_odl_s << " s is shorter than "
         << t.min_charlie_odl_s << " s";
      throw RouteError(os.str());
    }
    ArmPath arm;
    arm.hops = {t.selector_id + ":3", "ODL_Charlie", "FM_Charlie"};
    arm.mirror_owner = "Charlie";
    r.arms[1] = arm;
    r.same_branch = true;
    r.uses_charlie_odl = true;
  } else {
    throw RouteError("switch " + t.selector_id + " has no port " + sel);
  }

  for (const auto &u : {u1, u2}) {
    if (!carries(r.arms[0], u) && !carries(r.arms[1], u)) {
      throw RouteError("unroutable: " + u + "'s modulators are not on the configured path");
    }
  }
  for (const auto &arm : r.arms) {
    if (!arm.branch.empty() && !carries(arm, u1) && !carries(arm, u2)) {
      throw RouteError("branch " + arm.branch + " is switched in but carries neither " + u1 + " nor " + u2);
    }
  }

  // Pulse leaving port 1: arm 0 out and back, across c_ab, arm 1 out and back.
  auto round_trip = [](const ArmPath &a, std::vector<std::string> &out) {
    out.insert(out.end(), a.hops.begin(), a.hops.end());
    out.insert(out.end(), a.hops.rbegin() + 1, a.hops.rend());
  };
  round_trip(r.arms[0], r.pulse_port1);
  r.pulse_port1.push_back("c_ab");
  round_trip(r.arms[1], r.pulse_port1);
  r.pulse_port2.assign(r.pulse_port1.rbegin(), r.pulse_port1.rend());

  for (const auto *pulse : {&r.pulse_port1, &r.pulse_port2}) {
    std::set<std::string> mirrors;
    for (const auto &h : *pulse) {
      if (h.rfind("FM_", 0) == 0 && !mirrors.insert(h).second) {
        throw RouteError("pulse visits " + h + " twice");
      }
    }
    if (mirrors.size() != 2) {
      throw RouteError("each pulse must visit exactly two mirrors");
    }
  }
  return r;
}

std::vector<std::pair<std::string, std::vector<std::string>>> switch_domains(const Topology &t) {
  std::vector<std::string> ids;
  for (const auto &b : t.branches) {
    ids.push_back(b.id);
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> out{
      {t.selector_id, {"1", "2", "3"}},
      {input_key(t.branch_switch_id, 1), ids},
      {input_key(t.branch_switch_id, 2), ids},
  };
  for (const auto &b : t.branches) {
    if (!b.terminal().switch_id.empty()) {
      out.push_back({b.terminal().switch_id, {"1", "2"}});
    }
  }
  return out;
}

std::vector<SwitchConfig> resolve_connection(const Topology &t, const std::string &u1, const std::string &u2) {
  if (u1 == u2) {
    throw InvalidPairError("a user cannot connect to itself: " + u1);
  }
  t.locate(u1);
  t.locate(u2);

  auto with_end_switches = [&](SwitchConfig c, std::initializer_list<const Branch *> used) {
    for (const Branch *b : used) {
      const Station &end = b->terminal();
      if (!end.switch_id.empty() && (end.user == u1 || end.user == u2)) {
        c[end.switch_id] = "2";
      }
    }
    return c;
  };

  std::vector<SwitchConfig> out;
  auto consider = [&](const SwitchConfig &c) {
    try {
      validate_route(t, c, u1, u2);
      out.push_back(c);
    } catch (const RouteError &) {
    }
  };
  const std::string k1 = input_key(t.branch_switch_id, 1), k2 = input_key(t.branch_switch_id, 2);
  for (const auto &b1 : t.branches) {
    consider(with_end_switches({{t.selector_id, "3"}, {k1, b1.id}}, {&b1}));
    for (const auto &b2 : t.branches) {
      if (b2.id != b1.id) {
        consider(with_end_switches({{t.selector_id, "2"}, {k1, b1.id}, {k2, b2.id}}, {&b1, &b2}));
      }
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) {
    throw RouteError("unroutable: no switch configuration connects " + u1 + " and " + u2);
  }
  return out;
}

FiberChannel compose_fibers(const std::vector<FiberChannel> &fibers) {
  FiberChannel out;
  double loss_db = 0.0, bs = 0.0, gi = 0.0, var_pol = 0.0, var_phase = 0.0;
  for (const auto &f : fibers) {
    out.length_km += f.length_km;
    loss_db += f.attenuation_db_per_km * f.length_km;
    bs += f.backscatter_per_km * f.length_km;
    gi += f.group_index * f.length_km;
    var_pol += f.polarization_sigma * f.polarization_sigma;
    var_phase += f.phase_sigma * f.phase_sigma;
    out.unitary = f.unitary * out.unitary;
    out.phase += f.phase;
  }
  if (out.length_km > 0.0) {
    out.attenuation_db_per_km = loss_db / out.length_km;
    out.backscatter_per_km = bs / out.length_km;
    out.group_index = gi / out.length_km;
  }
  out.polarization_sigma = std::sqrt(var_pol);
  out.phase_sigma = std::sqrt(var_phase);
  return out;
}

InterferometerState build_interferometer(const Topology &t, const Route &r, const PBSSpec &pbs, double xi) {
  InterferometerState s;
  s.pbs_a = pbs;
  s.pbs_b = pbs;
  s.xi_a = s.xi_b = s.xi_ab = xi;

  const bool same_arm = r.same_branch;
  for (int k = 0; k < 2; ++k) {
    const ArmPath &path = r.arms[k];
    Arm &arm = k == 0 ? s.arm_a : s.arm_b;
    arm.mirror_owner = path.mirror_owner;
    if (t.switch_loss_db > 0.0) {
      arm.elements.push_back(DelayLine{"switches", 0.0, t.switch_loss_db});
    }
    if (path.branch.empty()) {
      arm.elements.push_back(DelayLine{"ODL_Charlie", t.charlie_odl_s, 0.0});
      continue;
    }
    const Branch &b = *t.find_branch(path.branch);
    std::vector<const Station *> parties;
    for (const Station *st : path.modulating) {
      if (st->user == r.user1 || st->user == r.user2) {
        parties.push_back(st);
      }
    }
    std::vector<FiberChannel> pending;
    for (const auto &st : b.stations) {
      pending.push_back(st.segment);
      const auto it = std::find(parties.begin(), parties.end(), &st);
      if (it == parties.end()) {
        continue;
      }
      arm.elements.push_back(compose_fibers(pending));
      pending.clear();
      ModulatorStation m;
      m.user = st.user;
      m.role = st.user == r.user1 ? Role::Alice : Role::Bob;
      const bool outermost = it + 1 == parties.end();
      if (same_arm && !outermost) {
        // The inner user modulates the pulse that is leaving toward
        // Charlie's mirror and will meet no other user.
        m.fires_on = k == 0 ? Pulse::ViaA : Pulse::ViaB;
        m.fire_bounce = 1;
      } else {
        m.fires_on = k == 0 ? Pulse::ViaB : Pulse::ViaA;
        m.fire_bounce = 2;
      }
      arm.elements.push_back(m);
      arm.elements.push_back(DelayLine{"ODL_" + st.user, st.odl_delay_s, 0.0});
    }
    if (!pending.empty()) {
      arm.elements.push_back(compose_fibers(pending));
    }
  }
  align_controllers(s);
  return s;
}

std::string to_string(const SwitchConfig &c) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto &[k, v] : c) {
    os << (first ? "" : ", ") << k << ": " << v;
    first = false;
  }
  os << "}";
  return os.str();
}

} // namespace sagnac
