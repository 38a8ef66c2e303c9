#include "streamflow/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "streamflow/reference.hpp"
#include "streamflow/rng.hpp"

namespace streamflow {

namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

GaParams ga_from_json(const json& j) {
  GaParams p;
  p.population_size = j.value("population_size", p.population_size);
  p.generation_limit = j.value("generation_limit", p.generation_limit);
  p.elitism_count = j.value("elitism_count", p.elitism_count);
  p.crossover_prob = j.value("crossover_prob", p.crossover_prob);
  p.mutation_prob = j.value("mutation_prob", p.mutation_prob);
  p.immigrant_count = j.value("immigrant_count", p.immigrant_count);
  p.validate();
  return p;
}

json ga_to_json(const GaParams& p) {
  return json{{"population_size", p.population_size},
              {"generation_limit", p.generation_limit},
              {"elitism_count", p.elitism_count},
              {"crossover_prob", p.crossover_prob},
              {"mutation_prob", p.mutation_prob},
              {"immigrant_count", p.immigrant_count}};
}

}  // namespace

std::optional<std::uint64_t> env_seed_override() {
  const char* v = std::getenv("STREAMFLOW_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    return static_cast<std::uint64_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw config_error(std::string("STREAMFLOW_SEED is not a number: ") + v);
  }
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("scenario file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw config_error("unsupported scenario format_version");
    Scenario sc;
    sc.workflow_path = j.at("workflow").get<std::string>();
    sc.catalog_path = j.at("catalog").get<std::string>();
    sc.scheduler = scheduler_from_string(j.value("scheduler", "adaptive"));
    sc.horizon_s = j.value("horizon_s", std::int64_t{180});
    if (sc.horizon_s <= 0) throw config_error("horizon_s must be > 0");
    if (j.contains("initial_rate_units"))
      sc.initial_rate_units = j["initial_rate_units"].get<std::int64_t>();
    sc.seed = j.value("seed", std::uint64_t{1});
    sc.reps = j.value("reps", 10);
    if (sc.reps < 1) throw config_error("reps must be >= 1");
    if (j.contains("ga")) sc.ga = ga_from_json(j["ga"]);
    if (j.contains("events")) {
      const auto& je = j["events"];
      if (je.is_array()) {
        for (const auto& e : je) {
          Scenario::ExplicitEvent ev;
          ev.at_s = e.at("at_s").get<std::int64_t>();
          ev.source_id = e.at("source").get<std::string>();
          ev.direction = direction_from_string(e.at("direction").get<std::string>());
          ev.delta_units = e.at("delta_units").get<std::int64_t>();
          sc.explicit_events.push_back(std::move(ev));
        }
        std::sort(sc.explicit_events.begin(), sc.explicit_events.end(),
                  [](const auto& a, const auto& b) { return a.at_s < b.at_s; });
      } else {
        sc.event_spec.count = je.value("count", sc.event_spec.count);
        sc.event_spec.spacing_s = je.value("spacing_s", sc.event_spec.spacing_s);
        sc.event_spec.offset_s = je.value("offset_s", sc.event_spec.offset_s);
        sc.event_spec.direction = direction_from_string(je.value("direction", "increase"));
        sc.event_spec.range = range_from_string(je.value("range", "medium"));
      }
    }
    return sc;
  } catch (const json::exception& e) {
    throw config_error(std::string("scenario schema error: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("scenario file not found: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  Scenario sc = parse_scenario(buf.str());

  // Relative references resolve against the scenario file's directory.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  resolve(sc.workflow_path);
  resolve(sc.catalog_path);
  return sc;
}

std::string scenario_to_json(const Scenario& sc, const std::string& workflow_name) {
  json j;
  j["format_version"] = 1;
  j["workflow"] = sc.workflow_path;
  j["workflow_name"] = workflow_name;
  j["catalog"] = sc.catalog_path;
  j["scheduler"] = to_string(sc.scheduler);
  j["horizon_s"] = sc.horizon_s;
  if (sc.initial_rate_units) j["initial_rate_units"] = *sc.initial_rate_units;
  j["seed"] = sc.seed;
  j["reps"] = sc.reps;
  j["ga"] = ga_to_json(sc.ga);
  if (!sc.explicit_events.empty()) {
    json evs = json::array();
    for (const auto& e : sc.explicit_events)
      evs.push_back(json{{"at_s", e.at_s},
                         {"source", e.source_id},
                         {"direction", to_string(e.direction)},
                         {"delta_units", e.delta_units}});
    j["events"] = std::move(evs);
  } else {
    j["events"] = json{{"count", sc.event_spec.count},
                       {"spacing_s", sc.event_spec.spacing_s},
                       {"offset_s", sc.event_spec.offset_s},
                       {"direction", to_string(sc.event_spec.direction)},
                       {"range", to_string(sc.event_spec.range)}};
  }
  return j.dump();
}

std::string render_run_csv(const SimulationReport& report, const std::string& provenance) {
  std::ostringstream os;
  os << "# " << provenance << "\n";
  os << "t,exec_cost,transfer_cost,total_input_MBps,total_capacity_MBps,deficit_MBps\n";
  for (const auto& r : report.seconds) {
    os << r.t << ',' << fixed6(r.exec_cents) << ',' << fixed6(r.transfer_cents) << ','
       << fixed6(r.input_mbps) << ',' << fixed6(r.capacity_mbps) << ',' << fixed6(r.deficit_mbps)
       << "\n";
  }
  os << "total," << fixed6(report.totals.exec_cents) << ',' << fixed6(report.totals.transfer_cents)
     << ",,," << "\n";
  return os.str();
}

std::string render_events_csv(const SimulationReport& report, const std::string& provenance) {
  std::ostringstream os;
  os << "# " << provenance << "\n";
  os << "event_id,t,kind,delta_units,changes,post_cost_per_s,response_s\n";
  for (const auto& e : report.events) {
    os << e.id << ',' << e.at_s << ',' << to_string(e.direction) << ',' << e.delta_units << ','
       << e.changes << ',' << fixed6(e.post_cost_cents_s) << ',' << e.response_s << "\n";
  }
  return os.str();
}

std::string render_timings_csv(const SimulationReport& report) {
  std::ostringstream os;
  os << "# wall-clock diagnostics; excluded from determinism guarantees\n";
  os << "event_id,handler_ms\n";
  for (const auto& e : report.events) os << e.id << ',' << fixed6(e.handler_ms) << "\n";
  return os.str();
}

CostBreakdown ScenarioOutcome::mean_total() const {
  CostBreakdown mean;
  if (reps.empty()) return mean;
  for (const auto& r : reps) {
    mean.exec_cents += r.report.totals.exec_cents;
    mean.transfer_cents += r.report.totals.transfer_cents;
  }
  mean.exec_cents /= static_cast<double>(reps.size());
  mean.transfer_cents /= static_cast<double>(reps.size());
  return mean;
}

double ScenarioOutcome::mean_lower_bound() const {
  if (reps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : reps) sum += r.lower_bound.total();
  return sum / static_cast<double>(reps.size());
}

double ScenarioOutcome::mean_changes_per_event() const {
  std::int64_t changes = 0, events = 0;
  for (const auto& r : reps) {
    for (const auto& e : r.report.events) {
      changes += e.changes;
      ++events;
    }
  }
  return events == 0 ? 0.0 : static_cast<double>(changes) / static_cast<double>(events);
}

ScenarioOutcome run_scenario(const Scenario& sc, const Topology& topo, const CloudCatalog& cat) {
  ScenarioOutcome outcome;
  outcome.workflow_name = topo.workflow().name;

  const auto initial_units = topo.initial_source_units();
  for (int rep = 0; rep < sc.reps; ++rep) {
    RepOutcome r;
    r.seed = mix_seed(sc.seed, 1000 + static_cast<std::uint64_t>(rep));

    RunConfig cfg;
    cfg.scheduler = sc.scheduler;
    cfg.horizon_s = sc.horizon_s;
    cfg.initial_source_units = initial_units;
    cfg.ga = sc.ga;
    cfg.seed = r.seed;
    if (!sc.explicit_events.empty()) {
      for (const auto& e : sc.explicit_events) {
        VelocityChangeEvent ev;
        ev.at_s = e.at_s;
        ev.source = topo.source_index(e.source_id);
        ev.direction = e.direction;
        ev.delta_units = e.delta_units;
        cfg.events.push_back(ev);
      }
    } else {
      cfg.events = generate_events(topo, initial_units, sc.event_spec, mix_seed(r.seed, 7));
    }

    r.report = run_simulation(topo, cat, cfg);

    LowerBoundInputs lb;
    lb.horizon_s = sc.horizon_s;
    lb.initial_source_units = initial_units;
    for (const auto& ev : cfg.events)
      lb.events.push_back(LowerBoundInputs::Event{ev.at_s, ev.source, ev.signed_delta()});
    r.lower_bound = lower_bound_cost(topo, cat, lb);

    outcome.reps.push_back(std::move(r));
  }
  return outcome;
}

namespace {

// Applies the scenario's initial-rate override before indexing.
Topology scenario_topology(const Scenario& sc) {
  StreamWorkflow wf = load_workflow(sc.workflow_path);
  if (sc.initial_rate_units)
    for (auto& x : wf.external_sources) x.rate_units = *sc.initial_rate_units;
  return Topology(std::move(wf));
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& sc) {
  const Topology topo = scenario_topology(sc);
  const CloudCatalog cat = load_catalog(sc.catalog_path);
  return run_scenario(sc, topo, cat);
}

void simulate_to_dir(const Scenario& sc, const std::string& out_dir) {
  const Topology topo = scenario_topology(sc);
  const CloudCatalog cat = load_catalog(sc.catalog_path);
  const ScenarioOutcome outcome = run_scenario(sc, topo, cat);
  const std::string provenance = scenario_to_json(sc, outcome.workflow_name);

  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(std::filesystem::path(out_dir) / name);
    if (!f) throw config_error("cannot write " + name + " under " + out_dir);
    f << text;
  };

  json summary;
  summary["config"] = json::parse(provenance);
  summary["per_rep"] = json::array();

  std::vector<SecondRow> mean_rows(static_cast<std::size_t>(sc.horizon_s));
  for (std::size_t i = 0; i < outcome.reps.size(); ++i) {
    const auto& rep = outcome.reps[i];
    const std::string suffix = std::to_string(i);
    std::string rep_provenance = provenance;
    rep_provenance.pop_back();  // splice the rep seed into the JSON echo
    rep_provenance += ",\"rep\":" + suffix + ",\"rep_seed\":" + std::to_string(rep.seed) + "}";
    write("run_" + suffix + ".csv", render_run_csv(rep.report, rep_provenance));
    write("events_" + suffix + ".csv", render_events_csv(rep.report, rep_provenance));
    write("timings_" + suffix + ".csv", render_timings_csv(rep.report));

    for (std::size_t t = 0; t < mean_rows.size(); ++t) {
      const auto& row = rep.report.seconds[t];
      auto& m = mean_rows[t];
      m.t = row.t;
      m.exec_cents += row.exec_cents;
      m.transfer_cents += row.transfer_cents;
      m.input_mbps += row.input_mbps;
      m.capacity_mbps += row.capacity_mbps;
      m.deficit_mbps += row.deficit_mbps;
    }

    json jr;
    jr["rep"] = i;
    jr["seed"] = rep.seed;
    jr["exec"] = rep.report.totals.exec_cents;
    jr["transfer"] = rep.report.totals.transfer_cents;
    jr["total"] = rep.report.totals.total();
    jr["lower_bound_total"] = rep.lower_bound.total();
    jr["initial_cost_per_s"] = rep.report.initial_cost_cents_s;
    json evs = json::array();
    for (const auto& e : rep.report.events)
      evs.push_back(json{{"id", e.id},
                         {"t", e.at_s},
                         {"kind", to_string(e.direction)},
                         {"delta_units", e.delta_units},
                         {"changes", e.changes},
                         {"post_cost_per_s", e.post_cost_cents_s},
                         {"response_s", e.response_s}});
    jr["events"] = std::move(evs);
    summary["per_rep"].push_back(std::move(jr));
  }

  const auto n = static_cast<double>(outcome.reps.size());
  {
    SimulationReport mean_report;
    for (auto& m : mean_rows) {
      m.exec_cents /= n;
      m.transfer_cents /= n;
      m.input_mbps /= n;
      m.capacity_mbps /= n;
      m.deficit_mbps /= n;
      mean_report.totals.exec_cents += m.exec_cents;
      mean_report.totals.transfer_cents += m.transfer_cents;
    }
    mean_report.seconds = std::move(mean_rows);
    write("mean.csv", render_run_csv(mean_report, provenance));
  }

  const CostBreakdown mean = outcome.mean_total();
  summary["mean"] = json{{"exec", mean.exec_cents},
                         {"transfer", mean.transfer_cents},
                         {"total", mean.total()},
                         {"lower_bound_total", outcome.mean_lower_bound()},
                         {"changes_per_event", outcome.mean_changes_per_event()}};
  write("summary.json", summary.dump(2) + "\n");
}

namespace {

struct SummaryRow {
  std::string workflow;
  std::string scheduler;
  std::uint64_t seed;
  double total;
  double lower_bound;
  json config;
};

std::vector<SummaryRow> collect_summaries(const std::string& dir) {
  std::vector<SummaryRow> rows;
  if (!std::filesystem::exists(dir)) throw config_error("report directory not found: " + dir);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().filename() != "summary.json") continue;
    std::ifstream f(entry.path());
    json j;
    try {
      f >> j;
      SummaryRow row;
      row.workflow = j.at("config").at("workflow_name").get<std::string>();
      row.scheduler = j.at("config").at("scheduler").get<std::string>();
      row.seed = j.at("config").at("seed").get<std::uint64_t>();
      row.total = j.at("mean").at("total").get<double>();
      row.lower_bound = j.at("mean").at("lower_bound_total").get<double>();
      row.config = j.at("config");
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw config_error("bad summary " + entry.path().string() + ": " + e.what());
    }
  }
  if (rows.empty()) throw config_error("no summary.json found under " + dir);
  std::sort(rows.begin(), rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.workflow < b.workflow; });
  return rows;
}

}  // namespace

std::string compare_report_dirs(const std::vector<std::string>& dirs) {
  if (dirs.size() < 2) throw config_error("compare needs at least two report directories");
  std::vector<std::vector<SummaryRow>> sets;
  for (const auto& d : dirs) sets.push_back(collect_summaries(d));

  const auto& base = sets.front();
  for (const auto& set : sets) {
    if (set.size() != base.size())
      throw config_error("report sets cover different scenario counts");
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].workflow != base[i].workflow)
        throw config_error("report sets cover different workflows: " + set[i].workflow + " vs " +
                           base[i].workflow);
      if (set[i].seed != base[i].seed)
        throw config_error("report sets were produced with different seeds for " +
                           set[i].workflow);
    }
  }

  std::ostringstream os;
  os << "workflow";
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const std::string tag = sets[d].front().scheduler + "_" + std::to_string(d);
    os << ",total_" << tag;
  }
  for (std::size_t d = 1; d < dirs.size(); ++d) os << ",ratio_" << d << "_vs_0";
  os << ",lower_bound";
  for (std::size_t d = 0; d < dirs.size(); ++d) os << ",ratio_" << d << "_vs_lb";
  os << "\n";

  for (std::size_t i = 0; i < base.size(); ++i) {
    os << base[i].workflow;
    for (const auto& set : sets) os << ',' << fixed6(set[i].total);
    for (std::size_t d = 1; d < sets.size(); ++d)
      os << ',' << fixed6(base[i].total == 0.0 ? 0.0 : sets[d][i].total / base[i].total);
    os << ',' << fixed6(base[i].lower_bound);
    for (const auto& set : sets)
      os << ',' << fixed6(set[i].lower_bound == 0.0 ? 0.0 : set[i].total / set[i].lower_bound);
    os << "\n";
  }
  return os.str();
}

}  // namespace streamflow
