#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/plan.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow {

// Marker for "all instances have finished booting".
inline constexpr std::int64_t kSteadyState = std::numeric_limits<std::int64_t>::max();

// Snapshot of every stream rate in the application: the current source output
// rates plus the derived per-service input/output rates. out = gamma * in
// holds exactly for every service.
struct RateState {
  std::vector<std::int64_t> source_units;  // per external source
  std::vector<double> in_mbps;             // per service
  std::vector<double> out_mbps;            // per service

  double total_input() const {
    double s = 0.0;
    for (double v : in_mbps) s += v;
    return s;
  }
};

struct CostBreakdown {
  double exec_cents = 0.0;
  double transfer_cents = 0.0;
  double total() const { return exec_cents + transfer_cents; }
};

// Compute demand of one processing unit for the service (MIPS).
double unit_mips(const Service& s, double unit_dp_rate);

// Whole processing units one offer achieves for the service; requires
// offer.mips >= unit_mips.
std::int64_t offer_units(const VmOffer& offer, const Service& s, double unit_dp_rate);
bool offer_eligible(const VmOffer& offer, const Service& s, double unit_dp_rate);

// Data processing rate of one VM for the service, MB/s — always a whole
// multiple of unit_dp_rate. Throws error when the offer is too small.
double vm_rate(const Service& s, const VmOffer& offer, double unit_dp_rate);

// Capacity the service has actually online at `now` (booting instances
// contribute nothing).
double service_rate(const Topology& topo, int service, const SchedulingPlan& plan,
                    const CloudCatalog& cat, std::int64_t now = kSteadyState);
std::int64_t ready_capacity_units(const Topology& topo, int service, const SchedulingPlan& plan,
                                  const CloudCatalog& cat, std::int64_t now = kSteadyState);
// Capacity counting every provisioned instance, booting or not. This is the
// planning view used by the schedulers.
std::int64_t ordered_capacity_units(const Topology& topo, int service, const SchedulingPlan& plan,
                                    const CloudCatalog& cat);

// Whole units required to process a data rate.
std::int64_t demand_units(double rate_mbps, double unit_dp_rate);

// Nearest whole quanta for a raw rate change, halves rounding up
// (3.25 -> 3, 3.5 -> 4).
std::int64_t nearest_units(double rate_mbps, double unit);

// Propagate source rates through the DAG: in = lambda + sum(parent out *
// percent), out = gamma * in, in topological order.
RateState compute_rates(const Topology& topo, const std::vector<std::int64_t>& source_units);

// Comparison variant that feeds children from the parents' provisioned
// processing capacity instead of their actual output. Kept for side-by-side
// analysis only; capacity can exceed real data, so the default model above is
// what the schedulers and simulator use.
RateState compute_rates_literal(const Topology& topo, const SchedulingPlan& plan,
                                const CloudCatalog& cat,
                                const std::vector<std::int64_t>& source_units,
                                std::int64_t now = kSteadyState);

// Every service's online capacity covers its input rate.
bool is_feasible(const Topology& topo, const SchedulingPlan& plan, const CloudCatalog& cat,
                 const RateState& rates, std::int64_t now = kSteadyState);

// One velocity change, resolved: the source's output moves by delta_units
// whole quanta (positive or negative).
struct VelocityImpact {
  RateState before;  // state the change was applied to
  RateState rates;   // state after the change
  // Per service: |change| in required capacity units; nonzero only downstream
  // of the changed source.
  std::vector<std::int64_t> theta_units;
  std::vector<int> affected;  // services downstream of the source, topo order
  std::int64_t delta_units = 0;
  int source = -1;
};

// Throws error when a decrease would exceed a source's rate or drain an
// affected service's input to zero or below.
VelocityImpact velocity_impact(const Topology& topo, const RateState& rates, int source,
                               std::int64_t delta_units);

// Rate state after applying the change; equals compute_rates on the updated
// source rates.
RateState apply_velocity_change(const RateState& rates, const Topology& topo, int source,
                                std::int64_t delta_units);

// Provisioning cost accrued this second: every provisioned instance bills its
// price, booting instances included.
double exec_cost_per_second(const SchedulingPlan& plan, const CloudCatalog& cat);

// Stream transfer cost accrued this second. Edges whose endpoints share a
// cloud are free; cross-cloud edges bill the effective volume, reduced when
// the link cannot carry the stream within the second.
double transfer_cost_per_second(const Topology& topo, const SchedulingPlan& plan,
                                const RateState& rates, const CloudCatalog& cat);

// Volume billed for one cross-cloud stream of `out_mbps` with edge fraction
// `percent` over a link with the given bandwidth/latency.
double effective_transfer_volume(double out_mbps, double percent, double bandwidth_mbps,
                                 double latency_s);

CostBreakdown total_cost(const std::vector<CostBreakdown>& per_second);

}  // namespace streamflow
