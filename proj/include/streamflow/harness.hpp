#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamflow/ga.hpp"
#include "streamflow/simulator.hpp"

namespace streamflow {

// One runnable experiment: workflow + catalog + scheduler + event plan, with
// the seeds needed to reproduce it exactly.
struct Scenario {
  std::string workflow_path;
  std::string catalog_path;
  SchedulerKind scheduler = SchedulerKind::adaptive;
  std::int64_t horizon_s = 180;
  std::optional<std::int64_t> initial_rate_units;  // overrides every source when set
  EventSpec event_spec;
  struct ExplicitEvent {
    std::int64_t at_s;
    std::string source_id;
    Direction direction;
    std::int64_t delta_units;
  };
  std::vector<ExplicitEvent> explicit_events;  // used instead of event_spec when non-empty
  GaParams ga;
  std::uint64_t seed = 1;
  int reps = 10;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
// Fully resolved configuration echo, embedded in every output file.
std::string scenario_to_json(const Scenario& sc, const std::string& workflow_name);

// Text renderings of one run's report (CSV with a provenance comment header).
std::string render_run_csv(const SimulationReport& report, const std::string& provenance);
std::string render_events_csv(const SimulationReport& report, const std::string& provenance);
std::string render_timings_csv(const SimulationReport& report);

struct RepOutcome {
  std::uint64_t seed = 0;
  SimulationReport report;
  CostBreakdown lower_bound;
};

struct ScenarioOutcome {
  std::string workflow_name;
  std::vector<RepOutcome> reps;

  CostBreakdown mean_total() const;
  double mean_lower_bound() const;
  double mean_changes_per_event() const;
};

// Runs every repetition (rep r uses seed mix(seed, 1000 + r)) and computes the
// matching relaxed lower bound per rep.
ScenarioOutcome run_scenario(const Scenario& sc);
ScenarioOutcome run_scenario(const Scenario& sc, const Topology& topo, const CloudCatalog& cat);

// Runs the scenario and writes run_<r>.csv, events_<r>.csv, timings_<r>.csv,
// mean.csv and summary.json under out_dir. timings_*.csv carries wall-clock
// diagnostics and is the one output excluded from byte-for-byte determinism.
void simulate_to_dir(const Scenario& sc, const std::string& out_dir);

// Side-by-side totals for >= 2 report directories over identical scenarios:
// per workflow, each directory's mean total, its ratio to the first
// directory, and its ratio to the lower bound. Throws config_error on
// mismatched scenarios.
std::string compare_report_dirs(const std::vector<std::string>& dirs);

// Applies the override every entry point honors: the STREAMFLOW_SEED
// environment variable beats file and flag seeds.
std::optional<std::uint64_t> env_seed_override();

}  // namespace streamflow
