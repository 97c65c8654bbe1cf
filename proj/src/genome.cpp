#include "gaitevo/genome.hpp"

#include <cctype>
#include <charconv>

namespace gaitevo {

namespace {

bool known_opcode(Opcode op) {
  return op == Opcode::Delay || op == Opcode::Back || op == Opcode::Front ||
         op == Opcode::End;
}

bool value_in_range(Opcode op, int value) {
  switch (op) {
    case Opcode::Delay:
      return value >= 0 && value <= 1000;
    case Opcode::Back:
    case Opcode::Front:
      return value >= -90 && value <= 90;
    case Opcode::End:
      return value == 0;
  }
  return false;
}

bool servo_opcode(Opcode op) { return op == Opcode::Back || op == Opcode::Front; }

// Adjacent genes commanding the same servo to exactly negated nonzero angles.
bool opposite_pair(const Gene& left, const Gene& right) {
  return servo_opcode(left.opcode) && right.opcode == left.opcode &&
         left.value != 0 && right.value == -left.value;
}

}  // namespace

int Genome::effective_length() const {
  for (int i = 0; i < kGenomeLength; ++i) {
    if (genes[i].opcode == Opcode::End) return i;
  }
  return kGenomeLength;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OutOfRangeValue: return "OutOfRangeValue";
    case ViolationKind::BadOpcode: return "BadOpcode";
    case ViolationKind::DelayTooLong: return "DelayTooLong";
    case ViolationKind::OppositePair: return "OppositePair";
    case ViolationKind::WrongLength: return "WrongLength";
    case ViolationKind::MissingTerminator: return "MissingTerminator";
  }
  return "?";
}

ValidationReport validate_structure(std::span<const Gene> genes) {
  ValidationReport report;
  const int n = static_cast<int>(genes.size());
  if (n != kGenomeLength) {
    report.violations.push_back({n, ViolationKind::WrongLength});
  }
  bool has_end = false;
  for (int i = 0; i < n; ++i) {
    if (!known_opcode(genes[i].opcode)) {
      report.violations.push_back({i, ViolationKind::BadOpcode});
      continue;
    }
    if (genes[i].opcode == Opcode::End) has_end = true;
    if (!value_in_range(genes[i].opcode, genes[i].value)) {
      report.violations.push_back({i, ViolationKind::OutOfRangeValue});
    }
  }
  if (!has_end && n > 0) {
    report.violations.push_back({n - 1, ViolationKind::MissingTerminator});
  }
  return report;
}

ValidationReport validate(std::span<const Gene> genes, const ValidationLimits& limits) {
  ValidationReport report = validate_structure(genes);
  const int n = static_cast<int>(genes.size());
  for (int i = 0; i < n; ++i) {
    if (genes[i].opcode == Opcode::Delay && genes[i].value >= limits.delay_threshold) {
      report.violations.push_back({i, ViolationKind::DelayTooLong});
    }
    if (limits.forbid_opposite_pairs && i + 1 < n &&
        opposite_pair(genes[i], genes[i + 1])) {
      report.violations.push_back({i, ViolationKind::OppositePair});
    }
  }
  return report;
}

ValidationReport validate(const Genome& g, const ValidationLimits& limits) {
  return validate(std::span<const Gene>(g.genes), limits);
}

Genome parse_genome(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  if (tokens.size() != kGenomeLength) {
    throw ParseError(ParseError::Kind::WrongTokenCount, -1,
                     "expected " + std::to_string(kGenomeLength) + " tokens, got " +
                         std::to_string(tokens.size()));
  }

  Genome g;
  for (int t = 0; t < kGenomeLength; ++t) {
    const std::string_view tok = tokens[t];
    const char letter = tok[0];
    const Opcode op = static_cast<Opcode>(letter);
    if (!known_opcode(op)) {
      throw ParseError(ParseError::Kind::UnknownOpcode, t,
                       std::string("unknown opcode '") + letter + "' in token " +
                           std::to_string(t));
    }
    int value = 0;
    const char* first = tok.data() + 1;
    const char* last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
      throw ParseError(ParseError::Kind::MalformedToken, t,
                       "token " + std::to_string(t) + " ('" + std::string(tok) +
                           "') has no valid integer value");
    }
    if (!value_in_range(op, value)) {
      throw ParseError(ParseError::Kind::ValueOutOfRange, t,
                       "value " + std::to_string(value) + " out of range for opcode '" +
                           letter + "' in token " + std::to_string(t));
    }
    g.genes[t] = Gene{op, value};
  }
  return g;
}

std::string format_genome(const Genome& g) {
  std::string out;
  out.reserve(4 * kGenomeLength);
  for (int i = 0; i < kGenomeLength; ++i) {
    if (i > 0) out.push_back(' ');
    out.push_back(static_cast<char>(g.genes[i].opcode));
    out += std::to_string(g.genes[i].value);
  }
  return out;
}

Gene random_gene(Rng& rng, int delay_max) {
  static constexpr Opcode kMutable[3] = {Opcode::Delay, Opcode::Back, Opcode::Front};
  const Opcode op = kMutable[rng.uniform_int(0, 2)];
  const int value = op == Opcode::Delay ? rng.uniform_int(0, delay_max)
                                        : rng.uniform_int(-90, 90);
  return Gene{op, value};
}

Genome random_genome(Rng& rng, const ValidationLimits& limits) {
  Genome g;
  for (int i = 0; i + 1 < kGenomeLength; ++i) {
    for (;;) {
      const Gene candidate = random_gene(rng, limits.delay_threshold - 1);
      if (limits.forbid_opposite_pairs && i > 0 &&
          opposite_pair(g.genes[i - 1], candidate)) {
        continue;  // redraw against the left neighbour
      }
      g.genes[i] = candidate;
      break;
    }
  }
  g.genes[kGenomeLength - 1] = Gene{Opcode::End, 0};
  return g;
}

}  // namespace gaitevo
