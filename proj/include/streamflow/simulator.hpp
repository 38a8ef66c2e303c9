#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/cost.hpp"
#include "streamflow/ga.hpp"
#include "streamflow/plan.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow {

enum class SchedulerKind { adaptive, ga_replan, baseline };
enum class Direction { increase, decrease };
enum class VelocityRange { low, medium, high };

SchedulerKind scheduler_from_string(const std::string& s);  // throws config_error
Direction direction_from_string(const std::string& s);
VelocityRange range_from_string(const std::string& s);
std::string to_string(SchedulerKind k);
std::string to_string(Direction d);
std::string to_string(VelocityRange r);

struct VelocityChangeEvent {
  std::int64_t at_s = 0;
  int source = 0;
  Direction direction = Direction::increase;
  VelocityRange range = VelocityRange::medium;
  std::int64_t delta_units = 0;  // resolved magnitude, whole quanta

  std::int64_t signed_delta() const {
    return direction == Direction::increase ? delta_units : -delta_units;
  }
};

struct EventSpec {
  int count = 2;
  std::int64_t spacing_s = 10;
  std::int64_t offset_s = 5;
  Direction direction = Direction::increase;
  VelocityRange range = VelocityRange::medium;
};

// Draw `count` events at fixed spacing: a uniformly chosen source each time,
// with a percentage change drawn from the named range of that source's
// current rate, rounded half-up to whole quanta. Decreases are clamped so a
// source never drops to zero. Deterministic per seed.
std::vector<VelocityChangeEvent> generate_events(const Topology& topo,
                                                 const std::vector<std::int64_t>& initial_units,
                                                 const EventSpec& spec, std::uint64_t seed);

struct RunConfig {
  SchedulerKind scheduler = SchedulerKind::adaptive;
  std::int64_t horizon_s = 180;
  std::vector<std::int64_t> initial_source_units;
  std::vector<VelocityChangeEvent> events;  // sorted, at most one per second
  GaParams ga;
  std::uint64_t seed = 1;  // drives the shared initial plan and scheduler internals
};

struct SecondRow {
  std::int64_t t = 0;
  double exec_cents = 0.0;
  double transfer_cents = 0.0;
  double input_mbps = 0.0;     // sum of service input rates
  double capacity_mbps = 0.0;  // sum of online processing rates
  double deficit_mbps = 0.0;   // input not covered by online capacity
};

struct EventRecord {
  int id = 0;
  std::int64_t at_s = 0;
  Direction direction = Direction::increase;
  std::int64_t delta_units = 0;
  std::int64_t changes = 0;         // provisioned + deprovisioned instances
  double post_cost_cents_s = 0.0;   // cost rate once this event's plan has settled
  std::int64_t response_s = 0;      // seconds until the revised plan is fully online
  double handler_ms = 0.0;          // wall-clock scheduler time; diagnostics only
};

struct SimulationReport {
  std::vector<SecondRow> seconds;
  std::vector<EventRecord> events;
  CostBreakdown totals;
  double initial_cost_cents_s = 0.0;  // cost rate of the shared phase-1 plan
};

// Discrete one-second stepping over the horizon. Second 0 deploys the shared
// phase-1 plan (instances online immediately); each second accrues exec and
// transfer cost and records the rate series; event seconds invoke the
// configured scheduler. Increase provisions boot for the offer's boot time;
// immediate releases bill their final second; replan releases wait until the
// owning service's replacement instances are online. Throws
// unschedulable_error when a scheduler cannot cover a service.
SimulationReport run_simulation(const Topology& topo, const CloudCatalog& cat,
                                const RunConfig& cfg);

}  // namespace streamflow
