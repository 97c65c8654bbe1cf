#include "gaitevo/sim.hpp"

#include <cmath>

namespace gaitevo {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct Walker {
  const SimConfig& cfg;
  WalkerState s;
  bool fell = false;

  static double toward(double pos, double target, double slew) {
    double d = target - pos;
    if (d > slew) return slew;
    if (d < -slew) return -slew;
    return d;
  }

  // Signed ground displacement of a single-servo stroke.
  double stroke_cm(double dtheta) const {
    return dtheta < 0 ? -cfg.c_power * dtheta : -cfg.c_slip * dtheta;
  }

  // One 1 ms integration step. Heading turn is applied after the position
  // update; a step where both servos move leaves the body where it was.
  void tick() {
    const double df = toward(s.theta_front, s.target_front, cfg.slew_rate);
    const double db = toward(s.theta_back, s.target_back, cfg.slew_rate);
    s.theta_front += df;
    s.theta_back += db;
    double d = 0.0;
    double turn_sign = 0.0;
    if (df != 0.0 && db == 0.0) {
      d = stroke_cm(df);
      turn_sign = 1.0;
    } else if (db != 0.0 && df == 0.0) {
      d = stroke_cm(db);
      turn_sign = -1.0;
    }
    const double rad = s.heading * kDegToRad;
    s.x += d * std::cos(rad);
    s.y += d * std::sin(rad);
    s.heading += turn_sign * cfg.c_turn * d;
    s.t += kSimTimestepMs;
  }

  // Returns false when the commanded split topples the walker.
  bool command(Opcode op, int angle) {
    if (op == Opcode::Front) {
      s.target_front = angle;
    } else {
      s.target_back = angle;
    }
    if (std::abs(s.target_front - s.target_back) >= cfg.fall_split) {
      fell = true;
      return false;
    }
    return true;
  }
};

// on_sample(state) fires once per millisecond boundary, after any instant
// commands issued at that boundary, plus once for the final state.
template <typename OnSample>
SimOutcome run(const Genome& g, const SimConfig& cfg, OnSample&& on_sample) {
  if (ValidationReport structure = validate_structure(g.genes); !structure.ok()) {
    throw InvalidGenome(std::move(structure), "genome fails structural validation");
  }

  Walker w{cfg, {}, false};
  for (const Gene& gene : g.genes) {
    if (gene.opcode == Opcode::End) break;
    if (gene.opcode == Opcode::Delay) {
      for (int step = 0; step < gene.value; ++step) {
        on_sample(w.s);
        w.tick();
      }
    } else if (!w.command(gene.opcode, gene.value)) {
      break;
    }
  }
  on_sample(w.s);

  SimOutcome out;
  out.displacement_cm = w.s.x;
  out.deviation_deg = std::fabs(w.s.heading);
  out.fell = w.fell;
  out.duration_ms = w.s.t;
  return out;
}

}  // namespace

SimOutcome execute(const Genome& g, const SimConfig& cfg) {
  return run(g, cfg, [](const WalkerState&) {});
}

std::vector<WalkerState> trace(const Genome& g, const SimConfig& cfg) {
  std::vector<WalkerState> samples;
  run(g, cfg, [&samples](const WalkerState& s) { samples.push_back(s); });
  return samples;
}

}  // namespace gaitevo
