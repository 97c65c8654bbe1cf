#pragma once

#include <iosfwd>
#include <string>

#include "gaitevo/genome.hpp"
#include "gaitevo/sim.hpp"

namespace gaitevo {

// Fall sentinel, compared exactly everywhere. A walk of -9 is "worse than any
// fall" only by convention; the GA never needs to distinguish the two.
inline constexpr double kFallPenalty = -9.0;

// Backend-agnostic measurement of one genome run. Displacement may be
// negative (walking backward).
struct Evaluation {
  double displacement_cm = 0;
  bool fell = false;

  bool operator==(const Evaluation&) const = default;
};

inline double to_fitness(const Evaluation& e) {
  return e.fell ? kFallPenalty : e.displacement_cm;
}

// One evaluation in flight at a time per instance; the GA holds exactly one.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual std::string name() const = 0;
  virtual Evaluation evaluate(const Genome& g) = 0;
};

class SimEvaluator final : public Evaluator {
 public:
  explicit SimEvaluator(const SimConfig& cfg = {}) : cfg_(cfg) {}

  std::string name() const override { return "sim"; }
  Evaluation evaluate(const Genome& g) override;

  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
};

// Prints each genome and asks a human operator for the measured displacement.
// Accepts a signed decimal, or the literal FALL (any case); anything else
// re-prompts. Throws ConsoleClosed at end of input.
class ManualEvaluator final : public Evaluator {
 public:
  ManualEvaluator(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  std::string name() const override { return "manual"; }
  Evaluation evaluate(const Genome& g) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace gaitevo
