#include "gaitevo/fitness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "gaitevo/errors.hpp"

namespace gaitevo {

namespace {

std::string trimmed(const std::string& s) {
  auto begin = s.begin();
  auto end = s.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  return std::string(begin, end);
}

bool is_fall_word(const std::string& s) {
  if (s.size() != 4) return false;
  const char* fall = "fall";
  for (int i = 0; i < 4; ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != fall[i]) return false;
  }
  return true;
}

bool parse_decimal(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

}  // namespace

Evaluation SimEvaluator::evaluate(const Genome& g) {
  const SimOutcome outcome = execute(g, cfg_);
  return Evaluation{outcome.displacement_cm, outcome.fell};
}

Evaluation ManualEvaluator::evaluate(const Genome& g) {
  out_ << format_genome(g) << "\n";
  for (;;) {
    out_ << "measured displacement cm (or FALL): " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) {
      throw ConsoleClosed("operator console closed mid-run");
    }
    const std::string entry = trimmed(line);
    if (is_fall_word(entry)) return Evaluation{0.0, true};
    double cm = 0;
    if (parse_decimal(entry, cm)) return Evaluation{cm, false};
    // anything else re-prompts
  }
}

}  // namespace gaitevo
