#include "streamflow/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace streamflow {

PlanDelta baseline_handle_event(const Topology& topo, const CloudCatalog& cat,
                                const SchedulingPlan& plan, const VelocityImpact& impact) {
  PlanDelta delta;
  const bool increase = impact.delta_units > 0;
  const double udr = topo.unit_dp_rate();

  for (int service : impact.affected) {
    if (impact.theta_units[static_cast<std::size_t>(service)] == 0) continue;
    const Service& svc = topo.service(service);
    const std::int64_t needed =
        demand_units(impact.rates.in_mbps[static_cast<std::size_t>(service)], udr);
    std::int64_t capacity = ordered_capacity_units(topo, service, plan, cat);

    if (increase) {
      const int cloud = plan.of(service).cloud;
      const auto& offers = cat.clouds[static_cast<std::size_t>(cloud)].offers;
      int biggest = -1;
      for (std::size_t o = 0; o < offers.size(); ++o) {
        if (!offer_eligible(offers[o], svc, udr)) continue;
        if (biggest < 0 || offers[o].mips > offers[static_cast<std::size_t>(biggest)].mips)
          biggest = static_cast<int>(o);
      }
      if (biggest < 0)
        throw unschedulable_error("unschedulable increase: no eligible offer on cloud " +
                                  cat.clouds[static_cast<std::size_t>(cloud)].id + " for service " +
                                  svc.id);
      const std::int64_t per_vm =
          offer_units(offers[static_cast<std::size_t>(biggest)], svc, udr);
      while (capacity < needed) {
        delta.provision.push_back(PlanDelta::Provision{service, cloud, biggest});
        capacity += per_vm;
      }
    } else {
      // Largest instances go first; keep anything the remaining input needs.
      std::vector<const VmInstance*> instances;
      for (const auto& vm : plan.of(service).instances) instances.push_back(&vm);
      std::sort(instances.begin(), instances.end(), [&](const VmInstance* a, const VmInstance* b) {
        const double ma = cat.offer(a->cloud, a->offer).mips;
        const double mb = cat.offer(b->cloud, b->offer).mips;
        if (ma != mb) return ma > mb;
        return a->id < b->id;
      });
      for (const VmInstance* vm : instances) {
        const std::int64_t units = offer_units(cat.offer(vm->cloud, vm->offer), svc, udr);
        if (capacity - units >= needed) {
          delta.deprovision.push_back(PlanDelta::Deprovision{service, vm->id});
          capacity -= units;
        }
      }
    }
  }
  return delta;
}

double cheapest_integral_fill(const Topology& topo, const CloudCatalog& cat, int service,
                              std::int64_t demand_units_needed) {
  if (demand_units_needed <= 0) return 0.0;
  const Service& svc = topo.service(service);
  const double udr = topo.unit_dp_rate();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cloud : cat.clouds) {
    for (const auto& offer : cloud.offers) {
      if (!offer_eligible(offer, svc, udr)) continue;
      const std::int64_t units = static_cast<std::int64_t>(
          std::floor(offer.mips / unit_mips(svc, udr)));
      const auto count = (demand_units_needed + units - 1) / units;
      best = std::min(best, static_cast<double>(count) * offer.price_cents_s);
    }
  }
  if (!std::isfinite(best))
    throw unschedulable_error("no eligible offer anywhere for service " + svc.id);
  return best;
}

namespace {

// Cloud a service is forced onto by the input data: its own pin. Movable
// services can sit anywhere, so they force nothing.
int forced_cloud(const Topology& topo, const CloudCatalog& cat, int service) {
  const Service& svc = topo.service(service);
  if (svc.mobility == Mobility::unmovable) return cat.cloud_index(svc.pinned_cloud);
  return -1;
}

}  // namespace

CostBreakdown lower_bound_cost(const Topology& topo, const CloudCatalog& cat,
                               const LowerBoundInputs& inputs) {
  // Relaxed network figures: cheapest rate, narrowest pipe, tardiest link. The
  // narrow pipe throttles the billed volume; the high latency throttles it
  // further.
  double min_transfer = cat.ranges.egress_transfer_cost.lo;
  double min_bandwidth = cat.ranges.egress_bandwidth.lo;
  double max_latency = cat.ranges.egress_latency.hi;
  for (int i = 0; i < cat.transfer_cost.size(); ++i) {
    for (int j = 0; j < cat.transfer_cost.size(); ++j) {
      if (i == j) continue;
      min_transfer = std::min(min_transfer, cat.transfer_cost.at(i, j));
      min_bandwidth = std::min(min_bandwidth, cat.bandwidth.at(i, j));
      max_latency = std::max(max_latency, cat.latency.at(i, j));
    }
  }

  const double udr = topo.unit_dp_rate();
  auto source_units = inputs.initial_source_units;
  RateState rates = compute_rates(topo, source_units);
  std::size_t next_event = 0;

  CostBreakdown total;
  for (std::int64_t t = 0; t < inputs.horizon_s; ++t) {
    while (next_event < inputs.events.size() && inputs.events[next_event].at_s == t) {
      rates = apply_velocity_change(rates, topo, inputs.events[next_event].source,
                                    inputs.events[next_event].delta_units);
      ++next_event;
    }

    for (int s = 0; s < topo.service_count(); ++s) {
      const std::int64_t demand = demand_units(rates.in_mbps[static_cast<std::size_t>(s)], udr);
      total.exec_cents += cheapest_integral_fill(topo, cat, s, demand);
    }

    // Transfer a service cannot avoid: over its cheapest conceivable
    // placement, the in-edges whose origins are pinned elsewhere still cross.
    // Edges from movable origins are free here (they could co-locate).
    for (int s = 0; s < topo.service_count(); ++s) {
      const int pin = forced_cloud(topo, cat, s);
      double best = std::numeric_limits<double>::infinity();
      for (int dest = 0; dest < static_cast<int>(cat.clouds.size()); ++dest) {
        if (pin >= 0 && dest != pin) continue;
        double cents = 0.0;
        for (const auto& f : topo.parents_of(s)) {
          const int origin = forced_cloud(topo, cat, f.parent);
          if (origin < 0 || origin == dest) continue;
          const double out = rates.out_mbps[static_cast<std::size_t>(f.parent)];
          if (out <= 0.0) continue;
          cents +=
              effective_transfer_volume(out, f.percent, min_bandwidth, max_latency) * min_transfer;
        }
        for (const auto& f : topo.source_feeds_of(s)) {
          const int origin = cat.cloud_index(topo.source(f.source).location_cloud);
          if (origin == dest) continue;
          const double out =
              static_cast<double>(rates.source_units[static_cast<std::size_t>(f.source)]) *
              topo.min_dp_unit();
          if (out <= 0.0) continue;
          cents +=
              effective_transfer_volume(out, f.percent, min_bandwidth, max_latency) * min_transfer;
        }
        best = std::min(best, cents);
      }
      total.transfer_cents += best;
    }
  }
  return total;
}

}  // namespace streamflow
