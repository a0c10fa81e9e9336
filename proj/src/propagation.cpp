#include "sagnac/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sagnac {

double Arm::total_length_km() const {
  double l = 0.0;
  for (const auto &e : elements) {
    if (const auto *f = std::get_if<FiberChannel>(&e)) {
      l += f->length_km;
    }
  }
  return l;
}

double Arm::one_way_delay_s() const {
  double t = 0.0;
  for (const auto &e : elements) {
    if (const auto *f = std::get_if<FiberChannel>(&e)) {
      t += f->delay_s();
    } else if (const auto *d = std::get_if<DelayLine>(&e)) {
      t += d->delay_s;
    }
  }
  return t;
}

const FiberChannel *Arm::first_fiber() const {
  for (const auto &e : elements) {
    if (const auto *f = std::get_if<FiberChannel>(&e)) {
      return f;
    }
  }
  return nullptr;
}

FiberChannel *Arm::first_fiber() {
  return const_cast<FiberChannel *>(static_cast<const Arm *>(this)->first_fiber());
}

void InterferometerState::validate() const {
  if (!source_sop.is_normalized(1e-9)) {
    throw ConfigError("source SOP must be normalized");
  }
  if (!(source_power > 0.0)) {
    throw ConfigError("source power must be positive");
  }
  for (double xi : {xi_a, xi_b, xi_ab}) {
    if (!(xi > 0.0 && xi <= 1.0)) {
      throw ConfigError("controller alignment factor must lie in (0, 1]");
    }
  }
  pbs_a.validate();
  pbs_b.validate();
  for (const JonesMatrix *pc : {&pc_a, &pc_b, &pc_ab}) {
    if (!pc->is_unitary(1e-9)) {
      throw ConfigError("polarization controllers must be unitary");
    }
  }
  if (arm_a.mirror_owner.empty() || arm_b.mirror_owner.empty()) {
    throw ConfigError("both arms must terminate in a Faraday mirror");
  }
  if (!(coherence_time_s >= 0.0)) {
    throw ConfigError("coherence time must be >= 0");
  }
}

void align_controllers(InterferometerState &s) {
  s.pc_a = pc_align(s.c_a.unitary * s.source_sop, s.xi_a);
  s.pc_b = pc_align(s.c_b.unitary * s.source_sop, s.xi_b);
  const JonesVector v = JonesVector::vertical();
  s.pc_ab = pc_align_to(s.c_ab.unitary * v, v, s.xi_ab);
}

InterferometerState make_three_node(const FiberChannel &arm_a_fiber, const FiberChannel &arm_b_fiber,
                                    const PBSSpec &pbs, double xi) {
  InterferometerState s;
  s.pbs_a = pbs;
  s.pbs_b = pbs;
  s.xi_a = s.xi_b = s.xi_ab = xi;
  s.arm_a.elements = {arm_a_fiber, ModulatorStation{"Alice", Role::Alice, Pulse::ViaB, 2, 0.0},
                      DelayLine{"ODL_A", 0.0, 0.0}};
  s.arm_a.mirror_owner = "Alice";
  s.arm_b.elements = {arm_b_fiber, ModulatorStation{"Bob", Role::Bob, Pulse::ViaA, 2, 0.0},
                      DelayLine{"ODL_B", 0.0, 0.0}};
  s.arm_b.mirror_owner = "Bob";
  align_controllers(s);
  return s;
}

double TraceResult::visibility() const {
  const double sum = spd1 + spd0;
  if (!(sum > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (spd1 - spd0) / sum;
}

double TraceResult::fringe_visibility() const {
  const double sum = power_from_ca + power_from_cb;
  if (!(sum > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double ov = std::abs(inner(sop_from_ca, sop_from_cb));
  return std::min(1.0, 2.0 * std::sqrt(power_from_ca * power_from_cb) * ov / sum);
}

namespace {

// ---------------------------------------------------------------------------
// Port graph
// ---------------------------------------------------------------------------

enum class NodeKind { Splitter, TwoPort, Pbs, Mirror };

constexpr int kNoPhase = -1;

struct Node {
  NodeKind kind{NodeKind::TwoPort};
  std::string name;
  JonesMatrix forward{};
  JonesMatrix backward{};
  double amplitude{1.0};
  double delay{0.0};
  int phase_source{kNoPhase};
  const ModulatorStation *modulator{nullptr};
  PBSSpec pbs{};
  int arm_index{-1}; // first fiber of arm 0/1
};

struct Endpoint {
  int node{-1};
  int port{-1};
};

struct Graph {
  std::vector<Node> nodes;
  std::vector<std::array<Endpoint, 4>> links;
  std::vector<double> phases;
  int alpha_source{kNoPhase};
  int beta_source{kNoPhase};

  int add(Node n) {
    nodes.push_back(std::move(n));
    links.push_back({});
    return static_cast<int>(nodes.size()) - 1;
  }
  void connect(int a, int pa, int b, int pb) {
    links[a][pa] = {b, pb};
    links[b][pb] = {a, pa};
  }
  int phase(double value) {
    phases.push_back(value);
    return static_cast<int>(phases.size()) - 1;
  }
  int fiber(const FiberChannel &f, std::string name) {
    Node n;
    n.name = std::move(name);
    n.forward = f.unitary;
    n.backward = f.return_unitary.value_or(f.unitary).transpose();
    n.amplitude = std::sqrt(f.transmission());
    n.delay = f.delay_s();
    n.phase_source = phase(f.phase);
    return add(n);
  }
  int two_port(const JonesMatrix &m, std::string name, double loss_db = 0.0, double delay = 0.0) {
    Node n;
    n.name = std::move(name);
    n.forward = m;
    n.backward = m.transpose();
    n.amplitude = std::sqrt(db_to_fraction(loss_db));
    n.delay = delay;
    return add(n);
  }
};

// Appends an arm's elements after `from` and terminates it with a mirror.
void build_arm(Graph &g, Endpoint from, const Arm &arm, int arm_index) {
  bool first_fiber = true;
  for (const auto &e : arm.elements) {
    int id = -1;
    if (const auto *f = std::get_if<FiberChannel>(&e)) {
      id = g.fiber(*f, "fiber");
      if (first_fiber) {
        g.nodes[id].arm_index = arm_index;
        first_fiber = false;
      }
    } else if (const auto *m = std::get_if<ModulatorStation>(&e)) {
      id = g.two_port(JonesMatrix::identity(), "MOD_" + m->user, m->loss_db);
      g.nodes[id].modulator = m;
    } else if (const auto *d = std::get_if<DelayLine>(&e)) {
      id = g.two_port(JonesMatrix::identity(), d->name, d->loss_db, d->delay_s);
    }
    g.connect(from.node, from.port, id, 0);
    from = {id, 1};
  }
  Node fm;
  fm.kind = NodeKind::Mirror;
  fm.name = "FM_" + arm.mirror_owner;
  const int id = g.add(fm);
  g.connect(from.node, from.port, id, 0);
}

constexpr int kBsSpd1 = 0, kBsSpd0 = 1, kBsCa = 2, kBsCb = 3;

Graph build_modified(const InterferometerState &s) {
  Graph g;
  Node bs;
  bs.kind = NodeKind::Splitter;
  bs.name = "BS";
  const int nbs = g.add(bs);
  const int nca = g.fiber(s.c_a, "c_a");
  const int ncb = g.fiber(s.c_b, "c_b");
  const int npa = g.two_port(s.pc_a, "PC_a");
  const int npb = g.two_port(s.pc_b, "PC_b");
  Node pbs;
  pbs.kind = NodeKind::Pbs;
  pbs.name = "PBS_a";
  pbs.pbs = s.pbs_a;
  const int nbsa = g.add(pbs);
  pbs.name = "PBS_b";
  pbs.pbs = s.pbs_b;
  const int nbsb = g.add(pbs);
  const int ncab = g.fiber(s.c_ab, "c_ab");
  const int npab = g.two_port(s.pc_ab, "PC_ab");

  g.connect(nbs, kBsCa, nca, 0);
  g.connect(nca, 1, npa, 0);
  g.connect(npa, 1, nbsa, static_cast<int>(PbsPort::Common));
  g.connect(nbs, kBsCb, ncb, 0);
  g.connect(ncb, 1, npb, 0);
  g.connect(npb, 1, nbsb, static_cast<int>(PbsPort::Common));
  g.connect(nbsa, static_cast<int>(PbsPort::Upper), ncab, 0);
  g.connect(ncab, 1, npab, 0);
  g.connect(npab, 1, nbsb, static_cast<int>(PbsPort::Upper));
  build_arm(g, {nbsa, static_cast<int>(PbsPort::Transmit)}, s.arm_a, 0);
  build_arm(g, {nbsb, static_cast<int>(PbsPort::Transmit)}, s.arm_b, 1);
  g.alpha_source = g.phase(0.0);
  g.beta_source = g.phase(0.0);
  return g;
}

// ---------------------------------------------------------------------------
// Event tracing
// ---------------------------------------------------------------------------

struct Event {
  int node{0};
  int port{0};
  JonesVector amp{};
  double time{0.0};
  Pulse pulse{Pulse::ViaA};
  int bounces{0};
  bool modulated{false};
  int hops{0};
  std::vector<int> phase_counts;
};

struct Arrival {
  double time{0.0};
  JonesVector amp{};
  std::vector<int> phase_counts;
};

struct SignalCandidate {
  double power{-1.0};
  JonesVector amp{};
  double phase{0.0};
  bool modulated{false};
  double time{0.0};
};

double total_phase(const Graph &g, const std::vector<int> &counts) {
  double p = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) {
      p += counts[i] * g.phases[i];
    }
  }
  return p;
}

// Sums arrivals in coherence clusters. Within a cluster only phase differences
// relative to the first arrival enter, so identical phase histories interfere
// with an exactly zero relative phase.
double detected_power(const Graph &g, std::vector<Arrival> arrivals, double coherence_time) {
  std::sort(arrivals.begin(), arrivals.end(),
            [](const Arrival &x, const Arrival &y) { return x.time < y.time; });
  double total = 0.0;
  std::size_t i = 0;
  while (i < arrivals.size()) {
    std::size_t j = i + 1;
    while (j < arrivals.size() && arrivals[j].time - arrivals[j - 1].time <= coherence_time) {
      ++j;
    }
    JonesVector sum = arrivals[i].amp;
    for (std::size_t k = i + 1; k < j; ++k) {
      double rel = 0.0;
      bool any = false;
      for (std::size_t p = 0; p < g.phases.size(); ++p) {
        const int dc = arrivals[k].phase_counts[p] - arrivals[i].phase_counts[p];
        if (dc != 0) {
          rel += dc * g.phases[p];
          any = true;
        }
      }
      sum = sum + (any ? arrivals[k].amp * std::polar(1.0, rel) : arrivals[k].amp);
    }
    total += sum.norm2();
    i = j;
  }
  return total;
}

TraceResult run_trace(const Graph &g, const JonesVector &source, double source_power, double coherence_time,
                      double cutoff_fraction, const std::optional<ModulationSettings> &mod) {
  TraceResult r;
  r.injected = source_power;
  const double cutoff = cutoff_fraction * source_power;
  constexpr int kMaxHops = 4096;

  std::vector<Arrival> to_spd1, to_spd0;
  std::array<SignalCandidate, 2> signal{};
  std::vector<Event> stack;

  const JonesVector e0 = source * std::sqrt(source_power);
  Event launch;
  launch.phase_counts.assign(g.phases.size(), 0);
  launch.node = 0;
  // BS node 0: leave through c_a (reflected) and c_b (transmitted).
  for (const auto &[port, coeff, pulse] :
       {std::tuple{kBsCa, kBsReflect, Pulse::ViaA}, std::tuple{kBsCb, kBsTransmit, Pulse::ViaB}}) {
    const Endpoint next = g.links[0][port];
    Event e = launch;
    e.node = next.node;
    e.port = next.port;
    e.amp = e0 * coeff;
    e.pulse = pulse;
    stack.push_back(std::move(e));
  }

  auto forward_to = [&](Event ev, int node, int out_port) {
    const Endpoint next = g.links[node][out_port];
    const double p = ev.amp.norm2();
    if (next.node < 0 || ev.hops >= kMaxHops || p < cutoff) {
      r.lost += p;
      return;
    }
    ev.node = next.node;
    ev.port = next.port;
    ++ev.hops;
    stack.push_back(std::move(ev));
  };

  while (!stack.empty()) {
    Event ev = std::move(stack.back());
    stack.pop_back();
    ++r.events;
    const Node &n = g.nodes[ev.node];
    switch (n.kind) {
    case NodeKind::Splitter: {
      if (ev.port != kBsCa && ev.port != kBsCb) {
        r.lost += ev.amp.norm2();
        break;
      }
      const bool from_ca = ev.port == kBsCa;
      const cplx to1 = from_ca ? kBsReflect : kBsTransmit;
      const cplx to0 = from_ca ? kBsTransmit : kBsReflect;
      to_spd1.push_back({ev.time, ev.amp * to1, ev.phase_counts});
      to_spd0.push_back({ev.time, ev.amp * to0, ev.phase_counts});
      // Nominal signal: each pulse returns through the port it did not leave by.
      const bool nominal = (ev.pulse == Pulse::ViaA) != from_ca;
      const double p = ev.amp.norm2();
      auto &cand = signal[from_ca ? 0 : 1];
      if (nominal && p > cand.power) {
        cand = {p, ev.amp, total_phase(g, ev.phase_counts), ev.modulated, ev.time};
      }
      break;
    }
    case NodeKind::TwoPort: {
      const bool fwd = ev.port == 0;
      if (fwd && n.arm_index >= 0 && ev.bounces == 0) {
        r.arm_launch[n.arm_index] += ev.amp.norm2();
      }
      ev.amp = (fwd ? n.forward : n.backward) * ev.amp * n.amplitude;
      ev.time += n.delay;
      if (n.phase_source != kNoPhase) {
        ++ev.phase_counts[n.phase_source];
      }
      if (n.modulator && !fwd && mod && ev.pulse == n.modulator->fires_on &&
          ev.bounces == n.modulator->fire_bounce) {
        OpticalField f;
        f.power = ev.amp.norm2();
        f.final_pass = true;
        const OpticalField out = modulate(f, *mod, n.modulator->role);
        if (f.power > 0.0) {
          ev.amp = ev.amp * std::sqrt(out.power / f.power);
        }
        ++ev.phase_counts[n.modulator->role == Role::Alice ? g.alpha_source : g.beta_source];
        ev.modulated = true;
      }
      const int node = ev.node;
      forward_to(std::move(ev), node, fwd ? 1 : 0);
      break;
    }
    case NodeKind::Pbs: {
      const auto from = static_cast<PbsPort>(ev.port);
      for (int q = 0; q < 4; ++q) {
        if (q == ev.port) {
          continue;
        }
        const JonesMatrix t = pbs_transfer(n.pbs, from, static_cast<PbsPort>(q));
        if (t.max_abs() == 0.0) {
          continue;
        }
        Event out = ev;
        out.amp = t * ev.amp;
        if (q == static_cast<int>(PbsPort::Dump)) {
          r.lost += out.amp.norm2();
          continue;
        }
        forward_to(std::move(out), ev.node, q);
      }
      break;
    }
    case NodeKind::Mirror: {
      ev.amp = JonesMatrix::antisymmetric() * ev.amp;
      ++ev.bounces;
      const int node = ev.node;
      forward_to(std::move(ev), node, 0);
      break;
    }
    }
  }

  if (signal[0].power > 0.0 || signal[1].power > 0.0) {
    const double t_sig = signal[0].power >= signal[1].power ? signal[0].time : signal[1].time;
    auto in_window = [&](const std::vector<Arrival> &all) {
      std::vector<Arrival> out;
      for (const auto &a : all) {
        if (std::abs(a.time - t_sig) <= coherence_time) {
          out.push_back(a);
        }
      }
      return out;
    };
    r.signal_spd1 = detected_power(g, in_window(to_spd1), coherence_time);
    r.signal_spd0 = detected_power(g, in_window(to_spd0), coherence_time);
  }
  r.spd1 = detected_power(g, std::move(to_spd1), coherence_time);
  r.spd0 = detected_power(g, std::move(to_spd0), coherence_time);

  auto fill = [](const SignalCandidate &c, JonesVector &sop, double &power) {
    if (c.power > 0.0) {
      power = c.power;
      sop = c.amp * (1.0 / std::sqrt(c.power));
    }
  };
  fill(signal[0], r.sop_from_ca, r.power_from_ca);
  fill(signal[1], r.sop_from_cb, r.power_from_cb);
  // ViaA returns through c_b, ViaB through c_a.
  r.arm_phase = {signal[1].phase, signal[0].phase};
  r.modulated = {signal[1].modulated, signal[0].modulated};
  return r;
}

} // namespace

TraceResult trace_modified_sagnac(const InterferometerState &s, const std::optional<ModulationSettings> &m) {
  s.validate();
  if (m) {
    m->validate();
  }
  Graph g = build_modified(s);
  if (m) {
    g.phases[g.alpha_source] = m->alpha;
    g.phases[g.beta_source] = m->beta;
  }
  return run_trace(g, s.source_sop, s.source_power, s.coherence_time_s, s.power_cutoff, m);
}

TraceResult trace_standard_sagnac(const FiberChannel &loop, const JonesVector &source_sop,
                                  double coherence_time_s) {
  if (!source_sop.is_normalized(1e-9)) {
    throw ConfigError("source SOP must be normalized");
  }
  Graph g;
  Node bs;
  bs.kind = NodeKind::Splitter;
  bs.name = "BS";
  const int nbs = g.add(bs);
  const int nloop = g.fiber(loop, "loop");
  g.connect(nbs, kBsCa, nloop, 0);
  g.connect(nloop, 1, nbs, kBsCb);
  return run_trace(g, source_sop, 1.0, coherence_time_s, 1e-16, std::nullopt);
}

std::vector<FringePoint> interference_fringe(const InterferometerState &s, const std::vector<double> &deltas,
                                             ModulationSettings base) {
  std::vector<FringePoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    base.alpha = d;
    base.beta = 0.0;
    const TraceResult r = trace_modified_sagnac(s, base);
    out.push_back({d, r.spd1, r.spd0});
  }
  return out;
}

double fit_fringe_visibility(const std::vector<FringePoint> &points) {
  if (points.size() < 3) {
    throw PreconditionError("fit_fringe_visibility: need at least 3 points");
  }
  // Normal equations for the basis {1, cos d, sin d}.
  double a[3][4] = {};
  for (const auto &p : points) {
    const double basis[3] = {1.0, std::cos(p.delta), std::sin(p.delta)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a[i][j] += basis[i] * basis[j];
      }
      a[i][3] += basis[i] * p.spd1;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
        piv = r;
      }
    }
    std::swap(a[c], a[piv]);
    if (std::abs(a[c][c]) < 1e-300) {
      throw PreconditionError("fit_fringe_visibility: degenerate phase sweep");
    }
    for (int r = 0; r < 3; ++r) {
      if (r == c) {
        continue;
      }
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) {
        a[r][k] -= f * a[c][k];
      }
    }
  }
  const double c0 = a[0][3] / a[0][0], c1 = a[1][3] / a[1][1], c2 = a[2][3] / a[2][2];
  return std::hypot(c1, c2) / c0;
}

namespace {

struct Passage {
  std::string component;
  bool is_modulator{false};
  const ModulatorStation *station{nullptr};
  Direction dir{Direction::Forward};
  double time{0.0};
  int bounces{0};
};

// Walks an arm out to its mirror and back, appending passages.
void walk_arm(const Arm &arm, double &t, int &bounces, std::vector<Passage> &out) {
  auto visit = [&](const ArmElement &e, Direction dir) {
    if (const auto *f = std::get_if<FiberChannel>(&e)) {
      t += f->delay_s();
    } else if (const auto *d = std::get_if<DelayLine>(&e)) {
      if (!d->name.empty() && d->delay_s > 0.0 && dir == Direction::Forward) {
        out.push_back({d->name, false, nullptr, dir, t, bounces});
      }
      t += d->delay_s;
    } else if (const auto *m = std::get_if<ModulatorStation>(&e)) {
      out.push_back({"MOD_" + m->user, true, m, dir, t, bounces});
    }
  };
  for (const auto &e : arm.elements) {
    visit(e, Direction::Forward);
  }
  out.push_back({"FM_" + arm.mirror_owner, false, nullptr, Direction::Forward, t, bounces});
  ++bounces;
  for (auto it = arm.elements.rbegin(); it != arm.elements.rend(); ++it) {
    visit(*it, Direction::Backward);
  }
}

} // namespace

std::vector<TimingEntry> schedule_pulses(const InterferometerState &s, double rep_rate_hz, double pulse_width_s) {
  if (!(rep_rate_hz > 0.0) || !(pulse_width_s >= 0.0)) {
    throw PreconditionError("schedule_pulses: rep rate must be positive and pulse width >= 0");
  }
  const double period = 1.0 / rep_rate_hz;
  std::vector<TimingEntry> table;
  std::vector<std::pair<Pulse, Passage>> all;

  for (Pulse p : {Pulse::ViaA, Pulse::ViaB}) {
    const bool via_a = p == Pulse::ViaA;
    double t = (via_a ? s.c_a : s.c_b).delay_s();
    int bounces = 0;
    std::vector<Passage> passages;
    walk_arm(via_a ? s.arm_a : s.arm_b, t, bounces, passages);
    t += s.c_ab.delay_s();
    walk_arm(via_a ? s.arm_b : s.arm_a, t, bounces, passages);
    for (auto &ps : passages) {
      all.emplace_back(p, ps);
    }
  }

  for (const auto &[p, ps] : all) {
    const bool fires = ps.is_modulator && ps.dir == Direction::Backward && p == ps.station->fires_on &&
                       ps.bounces == ps.station->fire_bounce;
    table.push_back({ps.component, p, ps.dir, ps.time, fires});
  }

  // Each modulator must fire exactly once, on the last pass of its pulse.
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!all[i].second.is_modulator) {
      continue;
    }
    const auto &name = table[i].component;
    int fired = 0;
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (table[j].component == name && table[j].fires) {
        ++fired;
        for (std::size_t k = 0; k < table.size(); ++k) {
          if (table[k].component == name && table[k].pulse == table[j].pulse && table[k].time_s > table[j].time_s) {
            std::ostringstream os;
            os << name << " fires at t=" << table[j].time_s << " s but the same pulse passes again at t="
               << table[k].time_s << " s";
            throw SchedulingError(os.str());
          }
        }
      }
    }
    if (fired != 1) {
      throw SchedulingError(name + " must fire on exactly one pulse pass, fires on " + std::to_string(fired));
    }
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!all[i].second.is_modulator || table[i].direction != Direction::Forward) {
      continue;
    }
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (table[j].component != table[i].component || table[j].direction != Direction::Backward) {
        continue;
      }
      const double d = std::fmod(std::abs(table[i].time_s - table[j].time_s), period);
      if (std::min(d, period - d) < pulse_width_s) {
        std::ostringstream os;
        os << "counter-propagating pulses overlap in " << table[i].component << ": forward at t=" << table[i].time_s
           << " s, backward at t=" << table[j].time_s << " s";
        throw SchedulingError(os.str());
      }
    }
  }
  std::sort(table.begin(), table.end(), [](const TimingEntry &x, const TimingEntry &y) { return x.time_s < y.time_s; });
  return table;
}

} // namespace sagnac
