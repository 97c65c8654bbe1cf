#pragma once

#include <vector>

#include "gaitevo/genome.hpp"

namespace gaitevo {

// Integration step of the surrogate model. Derived golden values depend on
// the step size, so it is a constant rather than a config field.
inline constexpr int kSimTimestepMs = 1;

// Surrogate walker coefficients. The model is anisotropic on purpose:
// negative-going rotation of a single servo propels the body (c_power per
// degree), positive-going rotation drags it back (c_slip per degree), and
// simultaneous motion of both servos cancels out. Strokes also turn the
// heading, with opposite signs for the two servos, so straight walking needs
// balanced use of both.
//
// Defaults were fixed by a 100-seed sweep (see README, "Calibration") so
// that a default 20-iteration run shows clear learning: median best >= 4 cm
// and at least twice the initial random population's best.
struct SimConfig {
  double slew_rate = 0.6;    // max servo speed [deg/ms]
  double c_power = 0.06;     // propulsion per degree of power stroke [cm/deg]
  double c_slip = 0.024;     // drag per degree of recovery stroke [cm/deg]
  double c_turn = 2.0;       // heading change per cm of stroke [deg/cm]
  double fall_split = 95.0;  // commanded |target_F - target_B| that topples [deg]

  bool operator==(const SimConfig&) const = default;
};

struct WalkerState {
  int t = 0;                 // elapsed time [ms]
  double theta_front = 0;    // servo positions [deg]
  double theta_back = 0;
  double target_front = 0;   // commanded targets [deg]
  double target_back = 0;
  double x = 0;              // body position [cm]; +x points at the target
  double y = 0;
  double heading = 0;        // [deg]; 0 = facing the target

  bool operator==(const WalkerState&) const = default;
};

struct SimOutcome {
  double displacement_cm = 0;  // final x
  double deviation_deg = 0;    // |final heading|
  bool fell = false;
  int duration_ms = 0;

  bool operator==(const SimOutcome&) const = default;
};

// Interprets the genome up to its first End. Servo commands take effect
// instantly and trigger the fall check against the commanded targets; Delay
// genes advance time in 1 ms steps during which servos slew toward their
// targets. Throws InvalidGenome when the genome fails validate_structure().
SimOutcome execute(const Genome& g, const SimConfig& cfg = {});

// Same run, returning the state at every millisecond boundary (duration + 1
// samples, t = 0 included). The final sample matches execute().
std::vector<WalkerState> trace(const Genome& g, const SimConfig& cfg = {});

}  // namespace gaitevo
