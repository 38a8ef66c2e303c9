#pragma once

#include <cstdint>
#include <vector>

namespace streamflow {

struct VmInstance {
  std::int64_t id = -1;        // unique within a plan's lifetime
  int cloud = -1;              // catalog cloud index
  int offer = -1;              // offer index within the cloud
  std::int64_t ready_at = 0;   // first simulation second the instance processes data
};

struct ServicePlan {
  int cloud = -1;                    // placement cloud index
  std::vector<VmInstance> instances; // provisioned multiset
};

struct SchedulingPlan {
  std::vector<ServicePlan> services;  // indexed by service
  std::int64_t next_instance_id = 0;

  explicit SchedulingPlan(int service_count = 0)
      : services(static_cast<std::size_t>(service_count)) {}

  ServicePlan& of(int service) { return services[static_cast<std::size_t>(service)]; }
  const ServicePlan& of(int service) const { return services[static_cast<std::size_t>(service)]; }

  VmInstance& add_instance(int service, int cloud, int offer, std::int64_t ready_at) {
    auto& sp = services[static_cast<std::size_t>(service)];
    sp.instances.push_back(VmInstance{next_instance_id++, cloud, offer, ready_at});
    return sp.instances.back();
  }

  std::int64_t instance_count() const {
    std::int64_t n = 0;
    for (const auto& sp : services) n += static_cast<std::int64_t>(sp.instances.size());
    return n;
  }
};

// Revision emitted by a scheduler for one velocity change. Provisions name
// offers (instances are materialized by the simulator with boot delays);
// deprovisions name existing instances.
struct PlanDelta {
  struct Provision {
    int service;
    int cloud;
    int offer;
  };
  struct Deprovision {
    int service;
    std::int64_t instance_id;
  };
  struct PlacementMove {
    int service;
    int cloud;
  };

  std::vector<Provision> provision;
  std::vector<Deprovision> deprovision;
  std::vector<PlacementMove> placement_moves;  // full replans only

  // When set, deprovisioned instances stay billed and working until the
  // owning service's replacement instances have booted.
  bool release_after_boot = false;

  std::int64_t change_count() const {
    return static_cast<std::int64_t>(provision.size() + deprovision.size());
  }
  bool empty() const { return provision.empty() && deprovision.empty(); }
};

}  // namespace streamflow
