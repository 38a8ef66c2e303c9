#pragma once

#include <cstdint>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/cost.hpp"
#include "streamflow/plan.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow {

// Heuristic-free competitor: increases provision the placement cloud's
// highest-MIPS offer until the new input is covered; decreases release
// instances largest-first while the remaining capacity still covers the new
// input.
PlanDelta baseline_handle_event(const Topology& topo, const CloudCatalog& cat,
                                const SchedulingPlan& plan, const VelocityImpact& impact);

// Unachievable reference cost: placement is relaxed, every service draws the
// offer with the lowest integral cost for its demand from any cloud, and
// transfer is billed only on edges whose endpoints are pinned to different
// clouds, with the cheapest transfer rate and the most throttling link the
// ranges allow. Evaluated per second over the horizon, events included.
struct LowerBoundInputs {
  std::int64_t horizon_s = 0;
  std::vector<std::int64_t> initial_source_units;
  // (second, source, delta_units) triples, sorted by second.
  struct Event {
    std::int64_t at_s;
    int source;
    std::int64_t delta_units;
  };
  std::vector<Event> events;
};

CostBreakdown lower_bound_cost(const Topology& topo, const CloudCatalog& cat,
                               const LowerBoundInputs& inputs);

// Cheapest whole-VM fill for one service at the given demand: minimizes
// price * ceil(demand / units) over every eligible offer in the catalog.
// Returns cents per second; 0 when demand is 0.
double cheapest_integral_fill(const Topology& topo, const CloudCatalog& cat, int service,
                              std::int64_t demand_units_needed);

}  // namespace streamflow
