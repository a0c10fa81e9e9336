#include "sagnac/components.hpp"

#include <cmath>

namespace sagnac {

JonesVector OpticalField::amplitude() const {
  return sop * std::polar(std::sqrt(power), phase);
}

OpticalField OpticalField::from_amplitude(const JonesVector &amp, const OpticalField &like,
                                          double phase_ref) {
  OpticalField out = like;
  out.power = amp.norm2();
  out.phase = phase_ref;
  if (out.power > 0.0) {
    out.sop = amp * (std::polar(1.0, -phase_ref) / std::sqrt(out.power));
  } else {
    out.sop = JonesVector::horizontal();
  }
  return out;
}

BsOutput bs_scatter(const std::optional<OpticalField> &in1, const std::optional<OpticalField> &in2,
                    double coherence_time) {
  if (!in1 && !in2) {
    throw PreconditionError("bs_scatter: at least one input is required");
  }
  const OpticalField &ref = in1 ? *in1 : *in2;
  OpticalField tmpl = ref;
  tmpl.incoherent = false;

  const bool both = in1 && in2;
  if (both && std::abs(in1->timestamp - in2->timestamp) > coherence_time) {
    // Incoherent: each input splits 50:50 on its own and powers add.
    BsOutput out;
    const OpticalField &strong = in1->power >= in2->power ? *in1 : *in2;
    for (OpticalField *o : {&out.out1, &out.out2}) {
      *o = strong;
      o->power = 0.5 * (in1->power + in2->power);
      o->incoherent = true;
    }
    return out;
  }

  const JonesVector zero{0.0, 0.0};
  const JonesVector e1 = in1 ? in1->amplitude() : zero;
  const JonesVector e2 = in2 ? in2->amplitude() : zero;
  const JonesVector o1 = e1 * kBsReflect + e2 * kBsTransmit;
  const JonesVector o2 = e1 * kBsTransmit + e2 * kBsReflect;
  if (both) {
    tmpl.timestamp = std::max(in1->timestamp, in2->timestamp);
  }
  return {OpticalField::from_amplitude(o1, tmpl, ref.phase),
          OpticalField::from_amplitude(o2, tmpl, ref.phase)};
}

PBSSpec PBSSpec::from_extinction_db(double extinction_db, double insertion_loss_db) {
  PBSSpec s;
  s.eta = 1.0 / (1.0 + std::pow(10.0, extinction_db / 10.0));
  s.insertion_loss_db = insertion_loss_db;
  return s;
}

double PBSSpec::extinction_ratio_db() const { return 10.0 * std::log10((1.0 - eta) / eta); }

void PBSSpec::validate() const {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw PreconditionError("PBSSpec: eta must lie in [0, 1)");
  }
  if (!(insertion_loss_db >= 0.0)) {
    throw PreconditionError("PBSSpec: insertion loss must be >= 0 dB");
  }
}

JonesMatrix pbs_transfer(const PBSSpec &spec, PbsPort from, PbsPort to) {
  const double il = std::sqrt(db_to_fraction(spec.insertion_loss_db));
  const double pass = std::sqrt(1.0 - spec.eta) * il;
  const double leak = std::sqrt(spec.eta) * il;
  auto pair = [&](PbsPort x, PbsPort y) {
    return (from == x && to == y) || (from == y && to == x);
  };
  if (pair(PbsPort::Common, PbsPort::Transmit) || pair(PbsPort::Upper, PbsPort::Dump)) {
    return JonesMatrix::diag(pass, leak);
  }
  if (pair(PbsPort::Transmit, PbsPort::Upper) || pair(PbsPort::Common, PbsPort::Dump)) {
    return JonesMatrix::diag(leak, pass);
  }
  return JonesMatrix::diag(0.0, 0.0);
}

PbsOutput pbs_route(const OpticalField &f, const PBSSpec &spec) {
  spec.validate();
  const JonesVector e = f.amplitude();
  PbsOutput out{
      OpticalField::from_amplitude(pbs_transfer(spec, PbsPort::Common, PbsPort::Transmit) * e, f,
                                   f.phase),
      OpticalField::from_amplitude(pbs_transfer(spec, PbsPort::Common, PbsPort::Dump) * e, f,
                                   f.phase)};
  return out;
}

OpticalField faraday_mirror_reflect(const OpticalField &f) {
  OpticalField out = f;
  out.sop = JonesMatrix::antisymmetric() * f.sop;
  out.direction = flipped(f.direction);
  return out;
}

JonesMatrix fm_round_trip(const JonesMatrix &fiber) {
  return fiber.transpose() * JonesMatrix::antisymmetric() * fiber;
}

JonesMatrix pc_align_to(const JonesVector &target, const JonesVector &axis, double xi) {
  if (!target.is_normalized(1e-9)) {
    throw PreconditionError("pc_align: target must be normalized");
  }
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw PreconditionError("pc_align: xi must lie in [0, 1]");
  }
  const bool to_v = std::abs(axis.v) > std::abs(axis.h);
  // Rows <target| and <target_perp| map target to H with unit determinant.
  const JonesMatrix to_h{std::conj(target.h), std::conj(target.v), -target.v, target.h};
  const double c = std::sqrt(xi), s = std::sqrt(1.0 - xi);
  const JonesMatrix mis{c, -s, s, c};
  JonesMatrix m = mis * to_h;
  if (to_v) {
    m = JonesMatrix{0.0, 1.0, 1.0, 0.0} * m;
  }
  return m;
}

JonesMatrix pc_align(const JonesVector &target, double xi) {
  return pc_align_to(target, JonesVector::horizontal(), xi);
}

OpticalField attenuate(const OpticalField &f, double loss_db) {
  if (!(loss_db >= 0.0)) {
    throw PreconditionError("attenuate: loss must be >= 0 dB");
  }
  OpticalField out = f;
  out.power = f.power * db_to_fraction(loss_db);
  return out;
}

double FiberChannel::alpha_np_per_km() const { return attenuation_db_per_km * std::log(10.0) / 10.0; }

double FiberChannel::transmission() const { return std::exp(-alpha_np_per_km() * length_km); }

double FiberChannel::delay_s() const { return length_km * 1e3 * group_index / kSpeedOfLight; }

OpticalField FiberChannel::propagate(const OpticalField &f) const {
  OpticalField out = f;
  const JonesMatrix m = f.direction == Direction::Forward ? unitary : return_unitary.value_or(unitary).transpose();
  out.sop = m * f.sop;
  out.power = f.power * transmission();
  out.phase = f.phase + phase;
  out.timestamp = f.timestamp + delay_s();
  return out;
}

void ModulationSettings::validate() const {
  if (!(amplitude_a >= 0.0 && amplitude_b >= 0.0)) {
    throw PreconditionError("ModulationSettings: amplitude factors must be >= 0");
  }
  if (!(pulse_rate_hz > 0.0 && wavelength_nm > 0.0)) {
    throw PreconditionError("ModulationSettings: pulse rate and wavelength must be positive");
  }
}

double photon_energy_j(double wavelength_nm) {
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, 2.0 * kPi);
  if (w < 0.0) {
    w += 2.0 * kPi;
  }
  return w;
}

OpticalField modulate(const OpticalField &f, const ModulationSettings &m, Role role) {
  if (!f.final_pass) {
    throw ContractViolation("modulate: modulators may only act on a pulse's final pass");
  }
  m.validate();
  OpticalField out = f;
  const bool alice = role == Role::Alice;
  out.phase = f.phase + (alice ? m.alpha : m.beta);
  const double mu = alice ? m.mu_a : m.mu_b;
  if (mu >= 0.0) {
    out.power = mu * photon_energy_j(m.wavelength_nm) * m.pulse_rate_hz;
  } else {
    out.power = f.power * (alice ? m.amplitude_a : m.amplitude_b);
  }
  return out;
}

int Circulator::route(int in_port) const {
  if (in_port == 1 || in_port == 2) {
    return in_port + 1;
  }
  return -1;
}

std::optional<OpticalField> Circulator::pass(const OpticalField &f, int in_port) const {
  const int out_port = route(in_port);
  if (out_port < 0) {
    return std::nullopt;
  }
  OpticalField out = attenuate(f, loss_db);
  out.port = "circ:" + std::to_string(out_port);
  return out;
}

OpticalField delay_line(const OpticalField &f, double delay_s, double loss_db) {
  if (!(delay_s >= 0.0)) {
    throw PreconditionError("delay_line: delay must be >= 0");
  }
  OpticalField out = attenuate(f, loss_db);
  out.timestamp += delay_s;
  return out;
}

OpticalField OpticalSwitch::pass(const OpticalField &f) const {
  if (position >= outputs.size()) {
    throw PreconditionError("switch " + id + " has no output " + std::to_string(position + 1));
  }
  OpticalField out = attenuate(f, loss_db);
  out.port = outputs[position];
  return out;
}

} // namespace sagnac
