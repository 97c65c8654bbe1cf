#include "gaitevo/ga.hpp"

#include <algorithm>
#include <cassert>

#include "gaitevo/errors.hpp"

namespace gaitevo {

namespace {

// Fitness descending, id ascending: the strict weak ordering used for both
// parent selection and replacement.
bool fitter(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.id < b.id;
}

double mean_fitness(const Population& pop) {
  double sum = 0;
  for (const Individual& m : pop.members) sum += m.fitness;
  return sum / static_cast<double>(pop.members.size());
}

void remove_by_id(Population& pop, std::uint64_t id) {
  std::erase_if(pop.members, [id](const Individual& m) { return m.id == id; });
}

Individual make_evaluated(std::uint64_t id, const Genome& g, const Evaluation& e,
                          int born_iteration) {
  Individual ind;
  ind.id = id;
  ind.genome = g;
  ind.fell = e.fell;
  ind.fitness = to_fitness(e);
  ind.born_iteration = born_iteration;
  return ind;
}

}  // namespace

const Individual& best_member(const Population& pop) {
  assert(!pop.members.empty());
  return *std::min_element(pop.members.begin(), pop.members.end(), fitter);
}

std::pair<Individual, Individual> select_parents(const Population& pop) {
  if (pop.size() < 2) {
    throw PopulationTooSmall("selection needs at least 2 members, have " +
                             std::to_string(pop.size()));
  }
  const Individual* first = nullptr;
  const Individual* second = nullptr;
  for (const Individual& m : pop.members) {
    if (first == nullptr || fitter(m, *first)) {
      second = first;
      first = &m;
    } else if (second == nullptr || fitter(m, *second)) {
      second = &m;
    }
  }
  return {*first, *second};
}

Genome crossover(const Genome& pa, const Genome& pb, Rng& rng) {
  const int cut = rng.uniform_int(1, kGenomeLength - 1);
  Genome child;
  for (int i = 0; i < kGenomeLength; ++i) {
    child.genes[i] = i < cut ? pa.genes[i] : pb.genes[i];
  }
  return child;
}

Genome mutate(const Genome& g, Rng& rng, double p_mut) {
  Genome out = g;
  for (int i = 0; i + 1 < kGenomeLength; ++i) {
    if (rng.bernoulli(p_mut)) {
      out.genes[i] = random_gene(rng, 1000);
    }
  }
  return out;
}

std::vector<std::uint64_t> catastrophe(Population& pop, Rng& rng, int cat_count) {
  const int removable = std::max(0, pop.size() - 2);  // floor of 2 survivors
  const int to_remove = std::min(cat_count, removable);
  std::vector<std::uint64_t> removed;
  removed.reserve(static_cast<std::size_t>(to_remove));
  for (int k = 0; k < to_remove; ++k) {
    const int idx = rng.uniform_int(0, pop.size() - 1);
    removed.push_back(pop.members[static_cast<std::size_t>(idx)].id);
    pop.members.erase(pop.members.begin() + idx);
  }
  return removed;
}

IterationRecord step(GaState& state, const GaConfig& cfg, Evaluator& evaluator) {
  state.iteration += 1;
  IterationRecord rec;
  rec.iteration = state.iteration;

  if (state.rng.bernoulli(cfg.p_cat)) {
    rec.catastrophe_removed = catastrophe(state.pop, state.rng, cfg.cat_count);
  }

  const auto [parent_a, parent_b] = select_parents(state.pop);

  std::optional<Genome> child;
  for (int attempt = 0; attempt <= cfg.max_child_retries; ++attempt) {
    Genome candidate = mutate(crossover(parent_a.genome, parent_b.genome, state.rng),
                              state.rng, cfg.p_mut);
    if (validate(candidate, cfg.limits).ok()) {
      child = candidate;
      break;
    }
  }

  if (child) {
    Evaluation eval;
    try {
      eval = evaluator.evaluate(*child);
    } catch (const Error& e) {
      throw EvaluatorFailure(state.iteration, e.what());
    }
    const Individual born =
        make_evaluated(state.next_id++, *child, eval, state.iteration);
    rec.child_id = born.id;
    rec.child_genome = born.genome;
    rec.child_fitness = born.fitness;

    if (state.pop.size() < state.pop.capacity) {
      state.pop.members.push_back(born);
      rec.accepted = true;
    } else if (born.fitness > parent_b.fitness) {
      // parent_b is the worse parent by the selection ordering
      remove_by_id(state.pop, parent_b.id);
      state.pop.members.push_back(born);
      rec.accepted = true;
      rec.replaced_id = parent_b.id;
    }
  }

  rec.best_cm = best_member(state.pop).fitness;
  rec.mean_cm = mean_fitness(state.pop);
  rec.population_size = state.pop.size();
  return rec;
}

std::vector<Individual> final_population(const RunLog& log) {
  Population pop;
  pop.capacity = log.config.capacity;
  pop.members = log.initial_population;
  for (const IterationRecord& rec : log.records) {
    for (const std::uint64_t id : rec.catastrophe_removed) remove_by_id(pop, id);
    if (!rec.accepted) continue;
    if (rec.replaced_id) remove_by_id(pop, *rec.replaced_id);
    Individual child;
    child.id = rec.child_id.value_or(0);
    child.genome = *rec.child_genome;
    child.fitness = *rec.child_fitness;
    child.fell = child.fitness == kFallPenalty;
    child.born_iteration = rec.iteration;
    pop.members.push_back(child);
  }
  return pop.members;
}

RunLog evolve(const GaConfig& cfg, Evaluator& evaluator, const SimConfig& sim_snapshot) {
  RunLog log;
  log.config = cfg;
  log.sim = sim_snapshot;
  log.backend = evaluator.name();

  GaState state{Population{{}, cfg.capacity}, Rng(cfg.seed), 0, 1};
  state.pop.members.reserve(static_cast<std::size_t>(cfg.capacity));
  for (int i = 0; i < cfg.capacity; ++i) {
    const Genome g = random_genome(state.rng, cfg.limits);
    Evaluation eval;
    try {
      eval = evaluator.evaluate(g);
    } catch (const Error& e) {
      throw EvaluatorFailure(0, e.what());
    }
    state.pop.members.push_back(make_evaluated(state.next_id++, g, eval, 0));
  }
  log.initial_population = state.pop.members;

  log.records.reserve(static_cast<std::size_t>(cfg.n_iterations));
  for (int it = 0; it < cfg.n_iterations; ++it) {
    log.records.push_back(step(state, cfg, evaluator));
  }
  return log;
}

}  // namespace gaitevo
