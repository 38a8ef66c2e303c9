#include "streamflow/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_set>

#include "streamflow/greedy.hpp"
#include "streamflow/reference.hpp"
#include "streamflow/rng.hpp"

namespace streamflow {

SchedulerKind scheduler_from_string(const std::string& s) {
  if (s == "adaptive") return SchedulerKind::adaptive;
  if (s == "ga-replan") return SchedulerKind::ga_replan;
  if (s == "baseline") return SchedulerKind::baseline;
  throw config_error("unknown scheduler: " + s);
}

Direction direction_from_string(const std::string& s) {
  if (s == "increase") return Direction::increase;
  if (s == "decrease") return Direction::decrease;
  throw config_error("unknown direction: " + s);
}

VelocityRange range_from_string(const std::string& s) {
  if (s == "low") return VelocityRange::low;
  if (s == "medium") return VelocityRange::medium;
  if (s == "high") return VelocityRange::high;
  throw config_error("unknown velocity range: " + s);
}

std::string to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::adaptive: return "adaptive";
    case SchedulerKind::ga_replan: return "ga-replan";
    case SchedulerKind::baseline: return "baseline";
  }
  return "?";
}

std::string to_string(Direction d) {
  return d == Direction::increase ? "increase" : "decrease";
}

std::string to_string(VelocityRange r) {
  switch (r) {
    case VelocityRange::low: return "low";
    case VelocityRange::medium: return "medium";
    case VelocityRange::high: return "high";
  }
  return "?";
}

namespace {

struct PctRange {
  double lo, hi;
};

PctRange change_percent_range(Direction d, VelocityRange r) {
  if (d == Direction::increase) {
    switch (r) {
      case VelocityRange::low: return {10.0, 30.0};
      case VelocityRange::medium: return {50.0, 70.0};
      case VelocityRange::high: return {90.0, 100.0};
    }
  }
  switch (r) {
    case VelocityRange::low: return {5.0, 15.0};
    case VelocityRange::medium: return {25.0, 35.0};
    case VelocityRange::high: return {45.0, 50.0};
  }
  return {0.0, 0.0};
}

}  // namespace

std::vector<VelocityChangeEvent> generate_events(const Topology& topo,
                                                 const std::vector<std::int64_t>& initial_units,
                                                 const EventSpec& spec, std::uint64_t seed) {
  if (spec.count < 0) throw config_error("event count must be >= 0");
  Rng rng(mix_seed(seed, 0x65766e74ull));  // "evnt"
  auto units = initial_units;
  std::vector<VelocityChangeEvent> events;
  for (int i = 0; i < spec.count; ++i) {
    VelocityChangeEvent ev;
    ev.at_s = spec.offset_s + static_cast<std::int64_t>(i) * spec.spacing_s;
    ev.source = static_cast<int>(rng.uniform_int(0, topo.source_count() - 1));
    ev.direction = spec.direction;
    ev.range = spec.range;
    const PctRange pct = change_percent_range(spec.direction, spec.range);
    const double fraction = rng.uniform_real(pct.lo, pct.hi) / 100.0;
    const std::int64_t current = units[static_cast<std::size_t>(ev.source)];
    std::int64_t delta = nearest_units(fraction * static_cast<double>(current), 1.0);
    if (spec.direction == Direction::decrease)
      delta = std::min(delta, std::max<std::int64_t>(current - 1, 0));
    ev.delta_units = delta;
    units[static_cast<std::size_t>(ev.source)] += ev.signed_delta();
    events.push_back(ev);
  }
  return events;
}

namespace {

// Instance removal scheduled for a future second; the instance bills through
// effective_at - 1 and is gone from effective_at on.
struct PendingRelease {
  std::int64_t effective_at;
  int service;
  std::int64_t instance_id;
};

struct PendingMove {
  std::int64_t effective_at;
  int service;
  int cloud;
};

void erase_instance(SchedulingPlan& plan, int service, std::int64_t instance_id) {
  auto& list = plan.of(service).instances;
  std::erase_if(list, [&](const VmInstance& vm) { return vm.id == instance_id; });
}

// Full-replan delta: diff the evolved target against the instances that are
// not already on their way out. Shared offers stay; everything else is
// provisioned fresh or queued for release once the replacements are online.
PlanDelta replan_delta(const Topology& topo, const SchedulingPlan& plan,
                       const std::unordered_set<std::int64_t>& leaving, const Chromosome& target) {
  PlanDelta delta;
  delta.release_after_boot = true;
  for (int s = 0; s < topo.service_count(); ++s) {
    const auto& gene = target.genes[static_cast<std::size_t>(s)];
    const auto& current = plan.of(s);

    if (gene.cloud != current.cloud) {
      for (const auto& vm : current.instances)
        if (!leaving.count(vm.id))
          delta.deprovision.push_back(PlanDelta::Deprovision{s, vm.id});
      for (int offer : gene.offers)
        delta.provision.push_back(PlanDelta::Provision{s, gene.cloud, offer});
      delta.placement_moves.push_back(PlanDelta::PlacementMove{s, gene.cloud});
      continue;
    }

    std::map<int, std::int64_t> want;
    for (int offer : gene.offers) ++want[offer];
    // Oldest instances of each offer kind are kept; excess goes newest-first.
    std::vector<const VmInstance*> have;
    for (const auto& vm : current.instances)
      if (!leaving.count(vm.id)) have.push_back(&vm);
    std::sort(have.begin(), have.end(),
              [](const VmInstance* a, const VmInstance* b) { return a->id < b->id; });
    std::map<int, std::int64_t> kept;
    for (const VmInstance* vm : have) {
      auto w = want.find(vm->offer);
      const std::int64_t limit = w == want.end() ? 0 : w->second;
      std::int64_t& count = kept[vm->offer];
      if (count < limit)
        ++count;
      else
        delta.deprovision.push_back(PlanDelta::Deprovision{s, vm->id});
    }
    for (const auto& [offer, n] : want) {
      const std::int64_t missing = n - kept[offer];
      for (std::int64_t k = 0; k < missing; ++k)
        delta.provision.push_back(PlanDelta::Provision{s, gene.cloud, offer});
    }
  }
  return delta;
}

}  // namespace

SimulationReport run_simulation(const Topology& topo, const CloudCatalog& cat,
                                const RunConfig& cfg) {
  if (cfg.horizon_s <= 0) throw config_error("horizon must be > 0");
  for (std::size_t i = 1; i < cfg.events.size(); ++i)
    if (cfg.events[i].at_s <= cfg.events[i - 1].at_s)
      throw config_error("events must be strictly ordered in time");

  RateState rates = compute_rates(topo, cfg.initial_source_units);

  // Phase 1: every scheduler starts from the same evolved placement.
  GaParams phase1 = cfg.ga;
  phase1.rng_seed = mix_seed(cfg.seed, 0x70686173ull);  // "phas"
  const EvolveResult initial = evolve(topo, cat, rates, phase1);
  SchedulingPlan plan = decode_plan(initial.best, 0);

  Rng greedy_rng(mix_seed(cfg.seed, 0x67726479ull));  // "grdy"

  SimulationReport report;
  report.initial_cost_cents_s = initial.best.fitness_cents_s;

  std::vector<PendingRelease> releases;
  std::vector<PendingMove> moves;
  std::size_t next_event = 0;

  for (std::int64_t t = 0; t < cfg.horizon_s; ++t) {
    // Due retirements happen before this second accrues.
    for (const auto& r : releases)
      if (r.effective_at <= t) erase_instance(plan, r.service, r.instance_id);
    std::erase_if(releases, [&](const PendingRelease& r) { return r.effective_at <= t; });
    for (const auto& m : moves)
      if (m.effective_at <= t) plan.of(m.service).cloud = m.cloud;
    std::erase_if(moves, [&](const PendingMove& m) { return m.effective_at <= t; });

    if (next_event < cfg.events.size() && cfg.events[next_event].at_s == t) {
      const VelocityChangeEvent& ev = cfg.events[next_event];
      const VelocityImpact impact = velocity_impact(topo, rates, ev.source, ev.signed_delta());

      const auto started = std::chrono::steady_clock::now();
      PlanDelta delta;
      switch (cfg.scheduler) {
        case SchedulerKind::adaptive:
          delta = adaptive_handle_event(topo, cat, plan, impact, greedy_rng);
          break;
        case SchedulerKind::baseline:
          delta = baseline_handle_event(topo, cat, plan, impact);
          break;
        case SchedulerKind::ga_replan: {
          GaParams replan = cfg.ga;
          replan.rng_seed = mix_seed(cfg.seed, 0x72706c00ull + static_cast<std::uint64_t>(next_event));
          const EvolveResult evolved = evolve(topo, cat, impact.rates, replan);
          std::unordered_set<std::int64_t> leaving;
          for (const auto& r : releases) leaving.insert(r.instance_id);
          delta = replan_delta(topo, plan, leaving, evolved.best);
          break;
        }
      }
      const double handler_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
              .count();

      // Provision first; release timing depends on the new instances.
      std::vector<std::int64_t> ready_of_service(static_cast<std::size_t>(topo.service_count()), t);
      for (const auto& p : delta.provision) {
        const std::int64_t ready = t + cat.offer(p.cloud, p.offer).boot_time_s;
        plan.add_instance(p.service, p.cloud, p.offer, ready);
        auto& slot = ready_of_service[static_cast<std::size_t>(p.service)];
        slot = std::max(slot, ready);
      }
      std::int64_t settled_at = t;
      for (const auto& d : delta.deprovision) {
        std::int64_t effective = t + 1;  // a released instance bills its final second
        if (delta.release_after_boot)
          effective = std::max(ready_of_service[static_cast<std::size_t>(d.service)], t + 1);
        releases.push_back(PendingRelease{effective, d.service, d.instance_id});
        if (delta.release_after_boot) settled_at = std::max(settled_at, effective);
      }
      for (const auto& m : delta.placement_moves) {
        const std::int64_t effective = ready_of_service[static_cast<std::size_t>(m.service)];
        moves.push_back(PendingMove{effective, m.service, m.cloud});
      }
      for (const auto& p : delta.provision)
        settled_at = std::max(settled_at, ready_of_service[static_cast<std::size_t>(p.service)]);

      rates = impact.rates;

      // Cost rate once everything pending has landed.
      double post_cost;
      {
        SchedulingPlan settled = plan;
        for (const auto& r : releases) erase_instance(settled, r.service, r.instance_id);
        for (const auto& m : moves) settled.of(m.service).cloud = m.cloud;
        post_cost = exec_cost_per_second(settled, cat) +
                    transfer_cost_per_second(topo, settled, rates, cat);
      }

      EventRecord rec;
      rec.id = static_cast<int>(next_event);
      rec.at_s = t;
      rec.direction = ev.direction;
      rec.delta_units = ev.delta_units;
      rec.changes = delta.change_count();
      rec.post_cost_cents_s = post_cost;
      rec.response_s = settled_at - t;
      rec.handler_ms = handler_ms;
      report.events.push_back(rec);
      ++next_event;
    }

    SecondRow row;
    row.t = t;
    row.exec_cents = exec_cost_per_second(plan, cat);
    row.transfer_cents = transfer_cost_per_second(topo, plan, rates, cat);
    row.input_mbps = rates.total_input();
    for (int s = 0; s < topo.service_count(); ++s) {
      const double cap = service_rate(topo, s, plan, cat, t);
      row.capacity_mbps += cap;
      row.deficit_mbps += std::max(0.0, rates.in_mbps[static_cast<std::size_t>(s)] - cap);
    }
    report.totals.exec_cents += row.exec_cents;
    report.totals.transfer_cents += row.transfer_cents;
    report.seconds.push_back(row);
  }

  return report;
}

}  // namespace streamflow
