#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitevo/errors.hpp"
#include "gaitevo/rng.hpp"

namespace gaitevo {

inline constexpr int kGenomeLength = 15;

// One instruction of the walker control program.
enum class Opcode : char {
  Delay = 'D',  // wait the given number of milliseconds
  Back = 'B',   // command the back servo to the given angle [deg]
  Front = 'F',  // command the front servo to the given angle [deg]
  End = 'E',    // stop executing; value is always 0
};

struct Gene {
  Opcode opcode;
  int value;

  bool operator==(const Gene&) const = default;
};

// Fixed-length control program. Canonical (generated) genomes carry End at
// position 14 and nowhere else; parsed genomes may terminate earlier.
struct Genome {
  std::array<Gene, kGenomeLength> genes{};

  // Genes actually executed: index of the first End, or kGenomeLength.
  int effective_length() const;

  bool operator==(const Genome&) const = default;
};

struct ValidationLimits {
  int delay_threshold = 1000;         // each Delay must satisfy value < threshold
  bool forbid_opposite_pairs = true;  // adjacent same-servo sign reversals

  bool operator==(const ValidationLimits&) const = default;
};

enum class ViolationKind {
  OutOfRangeValue,
  BadOpcode,
  DelayTooLong,
  OppositePair,
  WrongLength,
  MissingTerminator,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  int gene_index;
  ViolationKind kind;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool operator==(const ValidationReport&) const = default;
};

// Thrown where a caller hands an already-invalid genome to an operation whose
// contract requires a valid one (e.g. the simulator).
struct InvalidGenome : Error {
  InvalidGenome(ValidationReport r, const std::string& what)
      : Error(what), report(std::move(r)) {}

  ValidationReport report;
};

// Structural soundness: known opcodes, per-opcode value ranges, exactly 15
// genes, and at least one End so the program terminates.
ValidationReport validate_structure(std::span<const Gene> genes);

// Full existence conditions: structure plus the delay threshold (strict <)
// and, when enabled, adjacent same-servo exact sign reversals. Genes after an
// early End are checked all the same; generated genomes never have one.
ValidationReport validate(std::span<const Gene> genes, const ValidationLimits& limits = {});
ValidationReport validate(const Genome& g, const ValidationLimits& limits = {});

// Canonical text format: 15 single-space-separated tokens, each an opcode
// letter immediately followed by a decimal integer, e.g. "D50 B0 ... E0".
Genome parse_genome(std::string_view text);
std::string format_genome(const Genome& g);

// Fresh gene for positions 0-13: opcode uniform over {D, B, F}, Delay value
// uniform in [0, delay_max], servo angles uniform in [-90, 90].
Gene random_gene(Rng& rng, int delay_max);

// Random canonical genome that always passes validate() under `limits`:
// delays are drawn below the threshold and genes that would form an opposite
// pair with their left neighbour are redrawn.
Genome random_genome(Rng& rng, const ValidationLimits& limits = {});

}  // namespace gaitevo
