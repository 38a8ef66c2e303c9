#include "streamflow/cost.hpp"

#include <cmath>
#include <sstream>

namespace streamflow {

double unit_mips(const Service& s, double unit_dp_rate) { return unit_dp_rate * s.mi_per_mb; }

bool offer_eligible(const VmOffer& offer, const Service& s, double unit_dp_rate) {
  return offer.mips >= unit_mips(s, unit_dp_rate);
}

std::int64_t offer_units(const VmOffer& offer, const Service& s, double unit_dp_rate) {
  const double chi = unit_mips(s, unit_dp_rate);
  if (offer.mips < chi) {
    std::ostringstream os;
    os << "offer too small: " << offer.name << " has " << offer.mips << " MIPS, service " << s.id
       << " needs " << chi;
    throw error(os.str());
  }
  return static_cast<std::int64_t>(std::floor(offer.mips / chi));
}

double vm_rate(const Service& s, const VmOffer& offer, double unit_dp_rate) {
  return static_cast<double>(offer_units(offer, s, unit_dp_rate)) * unit_dp_rate;
}

std::int64_t ready_capacity_units(const Topology& topo, int service, const SchedulingPlan& plan,
                                  const CloudCatalog& cat, std::int64_t now) {
  const Service& s = topo.service(service);
  std::int64_t units = 0;
  for (const auto& vm : plan.of(service).instances)
    if (vm.ready_at <= now) units += offer_units(cat.offer(vm.cloud, vm.offer), s, topo.unit_dp_rate());
  return units;
}

std::int64_t ordered_capacity_units(const Topology& topo, int service, const SchedulingPlan& plan,
                                    const CloudCatalog& cat) {
  const Service& s = topo.service(service);
  std::int64_t units = 0;
  for (const auto& vm : plan.of(service).instances)
    units += offer_units(cat.offer(vm.cloud, vm.offer), s, topo.unit_dp_rate());
  return units;
}

double service_rate(const Topology& topo, int service, const SchedulingPlan& plan,
                    const CloudCatalog& cat, std::int64_t now) {
  return static_cast<double>(ready_capacity_units(topo, service, plan, cat, now)) *
         topo.unit_dp_rate();
}

std::int64_t demand_units(double rate_mbps, double unit_dp_rate) {
  if (rate_mbps <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(rate_mbps / unit_dp_rate));
}

std::int64_t nearest_units(double rate_mbps, double unit) {
  return static_cast<std::int64_t>(std::floor(rate_mbps / unit + 0.5));
}

RateState compute_rates(const Topology& topo, const std::vector<std::int64_t>& source_units) {
  RateState rs;
  rs.source_units = source_units;
  rs.in_mbps.assign(static_cast<std::size_t>(topo.service_count()), 0.0);
  rs.out_mbps.assign(static_cast<std::size_t>(topo.service_count()), 0.0);
  for (int s : topo.topo_order()) {
    double in = topo.lambda_of(s, source_units);
    for (const auto& f : topo.parents_of(s))
      in += rs.out_mbps[static_cast<std::size_t>(f.parent)] * f.percent;
    rs.in_mbps[static_cast<std::size_t>(s)] = in;
    rs.out_mbps[static_cast<std::size_t>(s)] = topo.service(s).gamma * in;
  }
  return rs;
}

RateState compute_rates_literal(const Topology& topo, const SchedulingPlan& plan,
                                const CloudCatalog& cat,
                                const std::vector<std::int64_t>& source_units, std::int64_t now) {
  RateState rs;
  rs.source_units = source_units;
  rs.in_mbps.assign(static_cast<std::size_t>(topo.service_count()), 0.0);
  rs.out_mbps.assign(static_cast<std::size_t>(topo.service_count()), 0.0);
  for (int s : topo.topo_order()) {
    double in = topo.lambda_of(s, source_units);
    for (const auto& f : topo.parents_of(s)) {
      const double parent_capacity = service_rate(topo, f.parent, plan, cat, now);
      in += topo.service(f.parent).gamma * parent_capacity * f.percent;
    }
    rs.in_mbps[static_cast<std::size_t>(s)] = in;
    rs.out_mbps[static_cast<std::size_t>(s)] = topo.service(s).gamma * in;
  }
  return rs;
}

bool is_feasible(const Topology& topo, const SchedulingPlan& plan, const CloudCatalog& cat,
                 const RateState& rates, std::int64_t now) {
  for (int s = 0; s < topo.service_count(); ++s)
    if (service_rate(topo, s, plan, cat, now) < rates.in_mbps[static_cast<std::size_t>(s)])
      return false;
  return true;
}

VelocityImpact velocity_impact(const Topology& topo, const RateState& rates, int source,
                               std::int64_t delta_units) {
  VelocityImpact impact;
  impact.source = source;
  impact.delta_units = delta_units;
  impact.before = rates;
  impact.theta_units.assign(static_cast<std::size_t>(topo.service_count()), 0);

  if (delta_units == 0) {
    impact.rates = rates;
    return impact;
  }

  auto new_units = rates.source_units;
  auto& src_rate = new_units[static_cast<std::size_t>(source)];
  if (src_rate + delta_units < 0) {
    std::ostringstream os;
    os << "decrease of " << -delta_units << " units exceeds source "
       << topo.source(source).id << " rate " << src_rate;
    throw error(os.str());
  }
  src_rate += delta_units;

  impact.rates = compute_rates(topo, new_units);
  impact.affected = topo.downstream_of(source);
  const double udr = topo.unit_dp_rate();
  for (int s : impact.affected) {
    const double before = rates.in_mbps[static_cast<std::size_t>(s)];
    const double after = impact.rates.in_mbps[static_cast<std::size_t>(s)];
    if (delta_units < 0 && before > 0.0 && !(after > 0.0)) {
      std::ostringstream os;
      os << "decrease exceeds current input of service " << topo.service(s).id << " (" << before
         << " MB/s)";
      throw error(os.str());
    }
    impact.theta_units[static_cast<std::size_t>(s)] =
        std::llabs(demand_units(after, udr) - demand_units(before, udr));
  }
  return impact;
}

RateState apply_velocity_change(const RateState& rates, const Topology& topo, int source,
                                std::int64_t delta_units) {
  return velocity_impact(topo, rates, source, delta_units).rates;
}

double exec_cost_per_second(const SchedulingPlan& plan, const CloudCatalog& cat) {
  double cents = 0.0;
  for (const auto& sp : plan.services)
    for (const auto& vm : sp.instances) cents += cat.offer(vm.cloud, vm.offer).price_cents_s;
  return cents;
}

double effective_transfer_volume(double out_mbps, double percent, double bandwidth_mbps,
                                 double latency_s) {
  const double rho = out_mbps * percent / bandwidth_mbps + latency_s;
  if (rho <= 1.0) return out_mbps;
  return out_mbps * percent / rho;
}

double transfer_cost_per_second(const Topology& topo, const SchedulingPlan& plan,
                                const RateState& rates, const CloudCatalog& cat) {
  double cents = 0.0;
  for (int s = 0; s < topo.service_count(); ++s) {
    const int dest_cloud = plan.of(s).cloud;
    for (const auto& f : topo.parents_of(s)) {
      const int origin_cloud = plan.of(f.parent).cloud;
      if (origin_cloud == dest_cloud) continue;
      const double out = rates.out_mbps[static_cast<std::size_t>(f.parent)];
      if (out <= 0.0) continue;
      const double volume = effective_transfer_volume(
          out, f.percent, cat.bandwidth.at(origin_cloud, dest_cloud),
          cat.latency.at(origin_cloud, dest_cloud));
      cents += volume * cat.transfer_cost.at(origin_cloud, dest_cloud);
    }
    // Streams arriving from external sources located on another cloud are
    // billed the same way.
    for (const auto& f : topo.source_feeds_of(s)) {
      const int origin_cloud = cat.cloud_index(topo.source(f.source).location_cloud);
      if (origin_cloud == dest_cloud) continue;
      const double out =
          static_cast<double>(rates.source_units[static_cast<std::size_t>(f.source)]) *
          topo.min_dp_unit();
      if (out <= 0.0) continue;
      const double volume = effective_transfer_volume(
          out, f.percent, cat.bandwidth.at(origin_cloud, dest_cloud),
          cat.latency.at(origin_cloud, dest_cloud));
      cents += volume * cat.transfer_cost.at(origin_cloud, dest_cloud);
    }
  }
  return cents;
}

CostBreakdown total_cost(const std::vector<CostBreakdown>& per_second) {
  CostBreakdown sum;
  for (const auto& b : per_second) {
    sum.exec_cents += b.exec_cents;
    sum.transfer_cents += b.transfer_cents;
  }
  return sum;
}

}  // namespace streamflow
