#pragma once

#include "sagnac/propagation.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagnac {

struct RouteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidPairError : RouteError {
  using RouteError::RouteError;
};

FiberChannel fiber_from_json(const nlohmann::json &j);
nlohmann::json fiber_to_json(const FiberChannel &f);

/// A user on a bus branch. The fiber `segment` leads from the previous station
/// (or the hub) to this one. Only the last station of a branch owns a Faraday
/// mirror; earlier stations are in-line modulator pairs on the bus.
struct Station {
  std::string user;
  FiberChannel segment;
  double odl_delay_s{0.0};
  /// Optional local switch of the end station: position 1 sends light straight
  /// to the mirror, position 2 through the user's modulators first.
  std::string switch_id;
};

struct Branch {
  std::string id;
  std::vector<Station> stations;
  const Station &terminal() const { return stations.back(); }
};

/// Charlie hub: internal port 1 feeds the branch switch directly, internal
/// port 2 goes through a 1x3 selector (1 = parked, 2 = branch switch,
/// 3 = delay line and Charlie's own mirror).
struct Topology {
  std::string selector_id{"SW_A"};
  std::string branch_switch_id{"SW_B"};
  double charlie_odl_s{1e-6};
  double min_charlie_odl_s{1e-9};
  double switch_loss_db{0.0};
  std::vector<Branch> branches;

  void validate() const;
  const Branch *find_branch(const std::string &id) const;
  /// Branch and station index of a user; throws RouteError for unknown users.
  std::pair<const Branch *, std::size_t> locate(const std::string &user) const;
  std::vector<std::string> users() const;

  static Topology from_json(const nlohmann::json &j);
  nlohmann::json to_json() const;
};

/// The star-plus-bus example: branches a (Alice), b (Bob), d (Debbie) and e
/// (Emily in-line, Frank at the end behind SW_F).
Topology example_topology();

/// Hybrid topology with `branches` branches and `users_per_branch[i]` users on
/// branch i; the end stations carry local switches.
Topology generate_topology(const std::vector<int> &users_per_branch);

/// Switch id -> selected port. Multi-input switches use "ID(k)" keys for
/// input k. Switches absent from the map are irrelevant to the connection.
using SwitchConfig = std::map<std::string, std::string>;

struct ArmPath {
  /// Branch id, or empty when the arm ends at Charlie's mirror.
  std::string branch;
  std::vector<std::string> hops;
  /// Stations whose modulators sit on the path, from the hub outward.
  std::vector<const Station *> modulating;
  std::string mirror_owner;
};

struct Route {
  std::string user1, user2;
  std::array<ArmPath, 2> arms;
  /// Hop lists of the pulse leaving Charlie's port 1 (arm 0 first) and of
  /// the counter-propagating pulse.
  std::vector<std::string> pulse_port1;
  std::vector<std::string> pulse_port2;
  bool same_branch{false};
  bool uses_charlie_odl{false};
};

Route validate_route(const Topology &t, const SwitchConfig &c, const std::string &u1, const std::string &u2);

/// All minimal valid configurations for the pair, sorted.
std::vector<SwitchConfig> resolve_connection(const Topology &t, const std::string &u1, const std::string &u2);

/// Every switch setting key with its admissible positions.
std::vector<std::pair<std::string, std::vector<std::string>>> switch_domains(const Topology &t);

/// Lowers a route to the three-node interferometer model with composed fibers.
/// user1 modulates in the Alice role, user2 in the Bob role.
InterferometerState build_interferometer(const Topology &t, const Route &r, const PBSSpec &pbs = {},
                                         double xi = 1.0);

/// Concatenates fibers in traversal order.
FiberChannel compose_fibers(const std::vector<FiberChannel> &fibers);

std::string to_string(const SwitchConfig &c);

} // namespace sagnac
