#include "streamflow/ga.hpp"

#include <algorithm>
#include <cmath>

namespace streamflow {

void GaParams::validate() const {
  if (population_size < 2) throw config_error("ga: population_size must be >= 2");
  if (generation_limit < 0) throw config_error("ga: generation_limit must be >= 0");
  if (elitism_count < 1) throw config_error("ga: elitism_count must be >= 1");
  if (crossover_prob < 0.0 || crossover_prob > 1.0)
    throw config_error("ga: crossover_prob must be in [0, 1]");
  if (mutation_prob < 0.0 || mutation_prob > 1.0)
    throw config_error("ga: mutation_prob must be in [0, 1]");
  if (immigrant_count < 0 || immigrant_count >= population_size)
    throw config_error("ga: immigrant_count must be < population_size");
}

namespace {

// Clouds that hold at least one eligible offer for the service.
std::vector<int> eligible_clouds(const Topology& topo, const CloudCatalog& cat, const Service& s) {
  std::vector<int> out;
  for (std::size_t c = 0; c < cat.clouds.size(); ++c) {
    const auto& offers = cat.clouds[c].offers;
    if (std::any_of(offers.begin(), offers.end(),
                    [&](const VmOffer& o) { return offer_eligible(o, s, topo.unit_dp_rate()); }))
      out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<int> eligible_offers(const Topology& topo, const CloudCatalog& cat, int cloud,
                                 const Service& s) {
  std::vector<int> out;
  const auto& offers = cat.clouds[static_cast<std::size_t>(cloud)].offers;
  for (std::size_t o = 0; o < offers.size(); ++o)
    if (offer_eligible(offers[o], s, topo.unit_dp_rate())) out.push_back(static_cast<int>(o));
  return out;
}

// Draw offers until the service's demand is covered. Draws stay within the
// remaining demand where the cloud allows it; otherwise the smallest eligible
// offer closes the gap, so the fill never overshoots by more than one offer.
std::vector<int> random_fill(const Topology& topo, const CloudCatalog& cat, int cloud,
                             const Service& s, std::int64_t demand, Rng& rng) {
  std::vector<int> picked;
  const auto pool = eligible_offers(topo, cat, cloud, s);
  if (pool.empty())
    throw unschedulable_error("unschedulable service " + s.id + ": no eligible offer on cloud " +
                              cat.clouds[static_cast<std::size_t>(cloud)].id);

  std::vector<std::int64_t> pool_units;
  pool_units.reserve(pool.size());
  for (int offer : pool)
    pool_units.push_back(offer_units(cat.offer(cloud, offer), s, topo.unit_dp_rate()));
  int smallest = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    const auto& a = cat.offer(cloud, pool[i]);
    const auto& b = cat.offer(cloud, pool[static_cast<std::size_t>(smallest)]);
    if (pool_units[i] < pool_units[static_cast<std::size_t>(smallest)] ||
        (pool_units[i] == pool_units[static_cast<std::size_t>(smallest)] &&
         (a.price_cents_s < b.price_cents_s ||
          (a.price_cents_s == b.price_cents_s && a.name < b.name))))
      smallest = static_cast<int>(i);
  }

  std::int64_t remaining = demand;
  std::vector<int> fitting;
  while (remaining > 0) {
    fitting.clear();
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool_units[i] <= remaining) fitting.push_back(static_cast<int>(i));
    const int slot = fitting.empty()
                         ? smallest
                         : fitting[static_cast<std::size_t>(rng.uniform_int(
                               0, static_cast<std::int64_t>(fitting.size()) - 1))];
    picked.push_back(pool[static_cast<std::size_t>(slot)]);
    remaining -= pool_units[static_cast<std::size_t>(slot)];
  }
  return picked;
}

Gene random_gene(const Topology& topo, const CloudCatalog& cat, const RateState& rates, int service,
                 Rng& rng) {
  const Service& s = topo.service(service);
  Gene g;
  if (s.mobility == Mobility::unmovable) {
    g.cloud = cat.cloud_index(s.pinned_cloud);
    if (eligible_offers(topo, cat, g.cloud, s).empty())
      throw unschedulable_error("unschedulable service " + s.id +
                                ": pinned cloud has no eligible offer");
  } else {
    const auto clouds = eligible_clouds(topo, cat, s);
    if (clouds.empty())
      throw unschedulable_error("unschedulable service " + s.id + ": no cloud fits");
    g.cloud = clouds[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(clouds.size()) - 1))];
  }
  const std::int64_t demand =
      demand_units(rates.in_mbps[static_cast<std::size_t>(service)], topo.unit_dp_rate());
  g.offers = random_fill(topo, cat, g.cloud, s, demand, rng);
  return g;
}

}  // namespace

Chromosome random_chromosome(const Topology& topo, const CloudCatalog& cat, const RateState& rates,
                             Rng& rng) {
  Chromosome c;
  c.genes.reserve(static_cast<std::size_t>(topo.service_count()));
  for (int s = 0; s < topo.service_count(); ++s)
    c.genes.push_back(random_gene(topo, cat, rates, s, rng));
  c.fitness_cents_s = fitness(c, topo, cat, rates);
  return c;
}

double fitness(const Chromosome& c, const Topology& topo, const CloudCatalog& cat,
               const RateState& rates) {
  double exec = 0.0;
  for (const auto& g : c.genes)
    for (int offer : g.offers) exec += cat.offer(g.cloud, offer).price_cents_s;

  // Transfer between placement clouds, same rules as the runtime cost.
  double transfer = 0.0;
  for (int s = 0; s < topo.service_count(); ++s) {
    const int dest = c.genes[static_cast<std::size_t>(s)].cloud;
    for (const auto& f : topo.parents_of(s)) {
      const int origin = c.genes[static_cast<std::size_t>(f.parent)].cloud;
      if (origin == dest) continue;
      const double out = rates.out_mbps[static_cast<std::size_t>(f.parent)];
      if (out <= 0.0) continue;
      transfer += effective_transfer_volume(out, f.percent, cat.bandwidth.at(origin, dest),
                                            cat.latency.at(origin, dest)) *
                  cat.transfer_cost.at(origin, dest);
    }
    for (const auto& f : topo.source_feeds_of(s)) {
      const int origin = cat.cloud_index(topo.source(f.source).location_cloud);
      if (origin == dest) continue;
      const double out =
          static_cast<double>(rates.source_units[static_cast<std::size_t>(f.source)]) *
          topo.min_dp_unit();
      if (out <= 0.0) continue;
      transfer += effective_transfer_volume(out, f.percent, cat.bandwidth.at(origin, dest),
                                            cat.latency.at(origin, dest)) *
                  cat.transfer_cost.at(origin, dest);
    }
  }
  return exec + transfer;
}

SchedulingPlan decode_plan(const Chromosome& c, std::int64_t ready_at) {
  SchedulingPlan plan(static_cast<int>(c.genes.size()));
  for (std::size_t s = 0; s < c.genes.size(); ++s) {
    plan.services[s].cloud = c.genes[s].cloud;
    for (int offer : c.genes[s].offers)
      plan.add_instance(static_cast<int>(s), c.genes[s].cloud, offer, ready_at);
  }
  return plan;
}

namespace {

void sort_ascending(std::vector<Chromosome>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Chromosome& a, const Chromosome& b) {
    return a.fitness_cents_s < b.fitness_cents_s;
  });
}

// Roulette wheel over weight 1/(1+fitness); binary search on the cumulative
// array.
int select_index(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.real01() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto i = static_cast<std::size_t>(it - cumulative.begin());
  return static_cast<int>(std::min(i, cumulative.size() - 1));
}

void mutate(Chromosome& c, const Topology& topo, const CloudCatalog& cat, const RateState& rates,
            Rng& rng) {
  const int service =
      static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(c.genes.size()) - 1));
  const Service& s = topo.service(service);
  Gene& g = c.genes[static_cast<std::size_t>(service)];
  if (s.mobility == Mobility::movable && rng.chance(0.5)) {
    const auto clouds = eligible_clouds(topo, cat, s);
    g.cloud = clouds[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(clouds.size()) - 1))];
  }
  const std::int64_t demand =
      demand_units(rates.in_mbps[static_cast<std::size_t>(service)], topo.unit_dp_rate());
  g.offers = random_fill(topo, cat, g.cloud, s, demand, rng);
}

}  // namespace

EvolveResult evolve(const Topology& topo, const CloudCatalog& cat, const RateState& rates,
                    const GaParams& params) {
  params.validate();
  Rng rng(params.rng_seed);
  const auto pop_size = static_cast<std::size_t>(params.population_size);

  std::vector<Chromosome> pop;
  pop.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) pop.push_back(random_chromosome(topo, cat, rates, rng));
  sort_ascending(pop);

  EvolveResult result;
  result.best_trace.push_back(pop.front().fitness_cents_s);

  for (int gen = 0; gen < params.generation_limit; ++gen) {
    const Chromosome elite = pop.front();

    // Fresh immigrants replace the worst candidates, keeping diversity up.
    for (int i = 0; i < params.immigrant_count; ++i)
      pop[pop_size - 1 - static_cast<std::size_t>(i)] = random_chromosome(topo, cat, rates, rng);

    std::vector<double> cumulative(pop_size);
    double acc = 0.0;
    for (std::size_t i = 0; i < pop_size; ++i) {
      acc += 1.0 / (1.0 + pop[i].fitness_cents_s);
      cumulative[i] = acc;
    }

    std::vector<Chromosome> next;
    next.reserve(pop_size);
    while (next.size() + 1 < pop_size) {
      const Chromosome& p1 = pop[static_cast<std::size_t>(select_index(cumulative, rng))];
      const Chromosome& p2 = pop[static_cast<std::size_t>(select_index(cumulative, rng))];
      Chromosome child = p1;
      if (topo.service_count() >= 2 && rng.chance(params.crossover_prob)) {
        const auto cut = static_cast<std::size_t>(
            rng.uniform_int(1, static_cast<std::int64_t>(topo.service_count()) - 1));
        for (std::size_t s = cut; s < child.genes.size(); ++s) child.genes[s] = p2.genes[s];
      }
      if (rng.chance(params.mutation_prob)) mutate(child, topo, cat, rates, rng);
      child.fitness_cents_s = fitness(child, topo, cat, rates);
      next.push_back(std::move(child));
    }
    next.push_back(elite);
    pop = std::move(next);
    sort_ascending(pop);
    result.best_trace.push_back(pop.front().fitness_cents_s);
  }

  result.best = pop.front();
  return result;
}

}  // namespace streamflow
