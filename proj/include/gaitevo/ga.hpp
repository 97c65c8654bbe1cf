#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaitevo/fitness.hpp"
#include "gaitevo/genome.hpp"
#include "gaitevo/rng.hpp"
#include "gaitevo/sim.hpp"

namespace gaitevo {

struct Individual {
  std::uint64_t id = 0;
  Genome genome;
  double fitness = 0;  // cm; exactly kFallPenalty when fell
  bool fell = false;
  int born_iteration = 0;

  bool operator==(const Individual&) const = default;
};

struct Population {
  std::vector<Individual> members;
  int capacity = 5;

  int size() const { return static_cast<int>(members.size()); }

  bool operator==(const Population&) const = default;
};

struct GaConfig {
  int capacity = 5;
  double p_mut = 0.2;         // per-gene replacement probability (calibrated)
  double p_cat = 0.1;         // catastrophe probability per iteration
  int cat_count = 2;          // members removed by one catastrophe
  ValidationLimits limits;
  int max_child_retries = 20; // redraws after an invalid child
  int n_iterations = 20;
  std::uint64_t seed = 0;

  bool operator==(const GaConfig&) const = default;
};

// Full audit record of one steady-state iteration.
struct IterationRecord {
  int iteration = 0;
  std::vector<std::uint64_t> catastrophe_removed;
  // Absent when every retry produced an invalid child. A rejected child still
  // consumed an id, so population membership can be replayed from the log.
  std::optional<std::uint64_t> child_id;
  std::optional<Genome> child_genome;
  std::optional<double> child_fitness;
  bool accepted = false;
  std::optional<std::uint64_t> replaced_id;
  double best_cm = 0;   // population statistics after the step
  double mean_cm = 0;
  int population_size = 0;

  bool operator==(const IterationRecord&) const = default;
};

struct RunLog {
  GaConfig config;
  SimConfig sim;         // snapshot of the surrogate coefficients in use
  std::string backend;
  std::vector<Individual> initial_population;
  std::vector<IterationRecord> records;

  bool operator==(const RunLog&) const = default;
};

// The two highest-fitness members, best first; ties go to the smaller id.
// Throws PopulationTooSmall below 2 members.
std::pair<Individual, Individual> select_parents(const Population& pop);

// Single-point crossover: cut k uniform in {1..14}, genes [0,k) from pa and
// [k,15) from pb. Canonical parents always yield a canonical child.
Genome crossover(const Genome& pa, const Genome& pb, Rng& rng);

// Replaces each of positions 0-13 independently with probability p_mut by a
// fresh random gene (Delay values span the full [0, 1000] range, so a mutant
// can violate the delay threshold and get filtered). Position 14 is never
// touched and End is never introduced.
Genome mutate(const Genome& g, Rng& rng, double p_mut);

// Removes min(cat_count, size - 2) members uniformly without replacement,
// fitness-blind. Returns the removed ids in draw order.
std::vector<std::uint64_t> catastrophe(Population& pop, Rng& rng, int cat_count);

struct GaState {
  Population pop;
  Rng rng;
  int iteration = 0;           // completed so far
  std::uint64_t next_id = 1;
};

// One steady-state iteration: possible catastrophe, parent selection, child
// generation with existence-condition retries, evaluation with the fall
// penalty, and the replacement policy. Backend errors surface as
// EvaluatorFailure carrying the iteration number.
IterationRecord step(GaState& state, const GaConfig& cfg, Evaluator& evaluator);

// Seeds the generator, builds and evaluates the initial population, then runs
// cfg.n_iterations steps. Identical config and evaluator behaviour give an
// identical RunLog. `sim_snapshot` is recorded in the log for provenance.
RunLog evolve(const GaConfig& cfg, Evaluator& evaluator, const SimConfig& sim_snapshot = {});

// Best member of a non-empty population (highest fitness, then smallest id).
const Individual& best_member(const Population& pop);

// Replays the log's membership changes (catastrophes, replacements, inserts)
// and returns the members alive after the last record.
std::vector<Individual> final_population(const RunLog& log);

}  // namespace gaitevo
