#pragma once

#include <string>

#include "gaitevo/genome.hpp"
#include "gaitevo/sim.hpp"

namespace fixtures {

// Coefficient set the hand-derived examples were computed with (e.g.
// "F-60 D200" walking 60 x 0.02 = 1.20 cm). The shipped defaults scale the
// stroke coefficients and tighten the fall threshold; these values stay
// frozen so the derived oracle arithmetic keeps reading off the page.
inline gaitevo::SimConfig reference_coefficients() {
  gaitevo::SimConfig cfg;
  cfg.slew_rate = 0.6;
  cfg.c_power = 0.02;
  cfg.c_slip = 0.008;
  cfg.c_turn = 2.0;
  cfg.fall_split = 120.0;
  return cfg;
}

// Published 15-instruction sample gait: must parse, validate cleanly and
// round-trip byte for byte.
inline const std::string kReferenceGait =
    "D50 B0 F0 D50 F-10 D50 B10 D50 F0 B0 D50 F10 D50 B-10 E0";

// No-op program: fourteen zero delays and the terminator.
inline const std::string kAllZeroDelay =
    "D0 D0 D0 D0 D0 D0 D0 D0 D0 D0 D0 D0 D0 D0 E0";

inline gaitevo::Genome genome_from(const std::string& text) {
  return gaitevo::parse_genome(text);
}

// Pads a short program with zero delays to 14 genes and appends the
// terminator, e.g. "F-60 D200 E0" -> a full 15-token canonical-width text.
inline std::string pad15(const std::string& prefix) {
  std::string text = prefix;
  int tokens = 0;
  bool in_token = false;
  for (const char ch : prefix) {
    if (ch == ' ') {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++tokens;
    }
  }
  for (int i = tokens; i < gaitevo::kGenomeLength - 1; ++i) text += " D0";
  text += " E0";
  return text;
}

}  // namespace fixtures
