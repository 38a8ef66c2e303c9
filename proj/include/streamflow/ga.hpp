#pragma once

#include <cstdint>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/cost.hpp"
#include "streamflow/plan.hpp"
#include "streamflow/rng.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow {

struct GaParams {
  int population_size = 50;
  int generation_limit = 50;
  int elitism_count = 1;
  double crossover_prob = 0.8;
  double mutation_prob = 0.3;
  int immigrant_count = 5;
  std::uint64_t rng_seed = 1;

  void validate() const;  // throws config_error
};

// One placement candidate: per service, a cloud and the offer multiset
// provisioned there. Every gene covers its service's input rate.
struct Gene {
  int cloud = -1;
  std::vector<int> offers;  // offer indices within the cloud, duplicates allowed
};

struct Chromosome {
  std::vector<Gene> genes;  // indexed by service
  double fitness_cents_s = 0.0;
};

// Uniform random placement: movable services draw a cloud with at least one
// eligible offer, then offers are drawn until the service's demand is covered.
// Throws unschedulable_error when some service fits on no cloud.
Chromosome random_chromosome(const Topology& topo, const CloudCatalog& cat, const RateState& rates,
                             Rng& rng);

// Cost rate of the decoded plan at the given steady-state rates (lower is
// better).
double fitness(const Chromosome& c, const Topology& topo, const CloudCatalog& cat,
               const RateState& rates);

struct EvolveResult {
  Chromosome best;
  std::vector<double> best_trace;  // best fitness after init and each generation
};

// Generational loop with elitism, random immigrants replacing the worst
// candidates, roulette-wheel selection (weight 1/(1+fitness), binary search on
// the cumulative array), single-point crossover over the gene array, and
// single-gene mutation. Deterministic given params.rng_seed.
EvolveResult evolve(const Topology& topo, const CloudCatalog& cat, const RateState& rates,
                    const GaParams& params);

// Materialize a chromosome as a plan whose instances are ready at `ready_at`.
SchedulingPlan decode_plan(const Chromosome& c, std::int64_t ready_at = 0);

}  // namespace streamflow
