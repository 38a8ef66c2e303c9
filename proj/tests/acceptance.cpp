// Acceptance suite: runs the full evaluation grid and prints one PASS/FAIL
// line per criterion. Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "streamflow/cost.hpp"
#include "streamflow/ga.hpp"
#include "streamflow/generator.hpp"
#include "streamflow/greedy.hpp"
#include "streamflow/harness.hpp"
#include "streamflow/reference.hpp"
#include "streamflow/simulator.hpp"

using namespace streamflow;

namespace {

const std::string kRepo = STREAMFLOW_REPO_DIR;
int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
  if (!detail.empty()) std::cout << " — " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

struct GridCell {
  std::string workflow;
  Direction direction;
  ScenarioOutcome adaptive;
  ScenarioOutcome baseline;
  ScenarioOutcome ga_replan;
};

struct Grid {
  std::vector<GridCell> cells;
  std::int64_t max_boot_s = 0;
};

Grid run_grid(const CloudCatalog& cat) {
  Grid grid;
  for (const auto& c : cat.clouds)
    for (const auto& o : c.offers) grid.max_boot_s = std::max(grid.max_boot_s, o.boot_time_s);

  const WorkflowStructure structures[] = {WorkflowStructure::montage, WorkflowStructure::inspiral,
                                          WorkflowStructure::epigenomics,
                                          WorkflowStructure::cybershake};
  const WorkflowSize sizes[] = {WorkflowSize::small, WorkflowSize::medium, WorkflowSize::large};

  int wf_index = 0;
  for (const auto st : structures) {
    for (const auto sz : sizes) {
      for (const auto dir : {Direction::increase, Direction::decrease}) {
        GeneratorConfig g;
        g.structure = st;
        g.size = sz;
        g.seed = 11000 + static_cast<std::uint64_t>(wf_index);
        g.cloud_ids = cat.cloud_ids();
        g.initial_rate_units = dir == Direction::increase ? 5 : 10;
        const Topology topo(generate_workflow(g));

        Scenario sc;
        sc.horizon_s = 180;
        sc.reps = 10;
        sc.seed = 500 + static_cast<std::uint64_t>(wf_index) * 2 +
                  (dir == Direction::increase ? 0 : 1);
        sc.event_spec.count = 2;
        sc.event_spec.spacing_s = 10;
        sc.event_spec.offset_s = 5;
        sc.event_spec.direction = dir;
        sc.event_spec.range = VelocityRange::medium;

        GridCell cell;
        cell.workflow = topo.workflow().name;
        cell.direction = dir;
        sc.scheduler = SchedulerKind::adaptive;
        cell.adaptive = run_scenario(sc, topo, cat);
        sc.scheduler = SchedulerKind::baseline;
        cell.baseline = run_scenario(sc, topo, cat);
        sc.scheduler = SchedulerKind::ga_replan;
        cell.ga_replan = run_scenario(sc, topo, cat);
        grid.cells.push_back(std::move(cell));
      }
      ++wf_index;
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------

void criterion1_cost_ordering(const Grid& grid) {
  int ordering_violations = 0;
  std::map<Direction, int> adaptive_beats_ga;
  std::map<Direction, int> soft_target_hits;
  std::ostringstream detail;

  for (const auto& cell : grid.cells) {
    const double lb = cell.adaptive.mean_lower_bound();
    const double ad = cell.adaptive.mean_total().total();
    const double bl = cell.baseline.mean_total().total();
    const double ga = cell.ga_replan.mean_total().total();
    if (!(lb <= ad && ad <= bl)) {
      ++ordering_violations;
      detail << " [" << cell.workflow << "/" << to_string(cell.direction) << " lb=" << lb
             << " ad=" << ad << " bl=" << bl << "]";
    }
    if (ad <= ga) ++adaptive_beats_ga[cell.direction];
    if (ad <= 1.5 * lb) ++soft_target_hits[cell.direction];
  }
  const bool ga_ok = adaptive_beats_ga[Direction::increase] >= 10 &&
                     adaptive_beats_ga[Direction::decrease] >= 10;
  std::ostringstream msg;
  msg << "ordering violations " << ordering_violations << "/24; adaptive<=ga-replan on "
      << adaptive_beats_ga[Direction::increase] << "/12 increase and "
      << adaptive_beats_ga[Direction::decrease] << "/12 decrease workflows"
      << " (soft target adaptive<=1.5x lower bound met on "
      << soft_target_hits[Direction::increase] + soft_target_hits[Direction::decrease]
      << "/24 cells)";
  report(1, ordering_violations == 0 && ga_ok,
         "cost ordering lower_bound <= adaptive <= baseline, adaptive <= ga-replan on >= 10/12",
         msg.str() + detail.str());
}

void criterion2_throughput(const Grid& grid) {
  long violations = 0;
  long late_deficits = 0;
  for (const auto& cell : grid.cells) {
    for (const auto& rep : cell.adaptive.reps) {
      std::set<std::int64_t> boot_window;
      for (const auto& ev : rep.report.events)
        for (std::int64_t t = ev.at_s; t < ev.at_s + ev.response_s; ++t) boot_window.insert(t);
      for (const auto& row : rep.report.seconds) {
        if (boot_window.count(row.t)) {
          // Deficits must clear within the longest boot time after any event.
          for (const auto& ev : rep.report.events)
            if (row.t >= ev.at_s + grid.max_boot_s && row.deficit_mbps != 0.0) ++late_deficits;
          continue;
        }
        if (row.deficit_mbps != 0.0 || row.capacity_mbps < row.input_mbps) ++violations;
      }
    }
  }
  std::ostringstream msg;
  msg << violations << " second(s) with uncovered input outside boot windows, " << late_deficits
      << " deficit second(s) past the max boot time, across "
      << grid.cells.size() * grid.cells.front().adaptive.reps.size() << " runs";
  report(2, violations == 0 && late_deficits == 0,
         "adaptive capacity covers input at every second outside boot windows", msg.str());
}

void criterion3_plan_changes(const Grid& grid) {
  long violations = 0;
  std::map<std::string, std::pair<double, long>> gap_acc;  // workflow -> (sum, count)
  for (const auto& cell : grid.cells) {
    for (std::size_t r = 0; r < cell.adaptive.reps.size(); ++r) {
      const auto& ad_events = cell.adaptive.reps[r].report.events;
      const auto& ga_events = cell.ga_replan.reps[r].report.events;
      for (std::size_t e = 0; e < ad_events.size() && e < ga_events.size(); ++e) {
        if (ad_events[e].changes > ga_events[e].changes) ++violations;
        auto& acc = gap_acc[cell.workflow];
        acc.first += static_cast<double>(ga_events[e].changes - ad_events[e].changes);
        acc.second += 1;
      }
    }
  }
  std::string largest;
  double largest_gap = -std::numeric_limits<double>::infinity();
  std::ostringstream gaps;
  for (const auto& [wf, acc] : gap_acc) {
    if (wf.find("100") == std::string::npos) continue;
    const double gap = acc.first / static_cast<double>(acc.second);
    gaps << " " << wf << "=" << std::round(gap * 10.0) / 10.0;
    if (gap > largest_gap) {
      largest_gap = gap;
      largest = wf;
    }
  }
  std::ostringstream msg;
  msg << violations << " event(s) where adaptive changed more than ga-replan; size-100 mean gaps:"
      << gaps.str() << "; largest on " << largest;
  report(3, violations == 0 && largest == "inspiral_100",
         "adaptive never changes more than ga-replan; largest size-100 gap on inspiral_100",
         msg.str());
}

double plain_minimax_value(const GameTreeNode& node, int depth, bool maximizing,
                           const EvalContext& ctx) {
  if (depth == 0) return evaluate_value(node, ctx);
  double best = maximizing ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
  for (const auto& child : node.children) {
    const double v = plain_minimax_value(child, depth - 1, !maximizing, ctx);
    best = maximizing ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

void criterion4_pruning(unsigned long long* cases_out) {
  unsigned long long cases = 0;
  long mismatches = 0;
  EvalContext ctx{false, 1, 1000.0, 1};  // value of a leaf with price 1 equals its units

  auto make_leaf = [](std::int64_t units) {
    GameTreeNode n;
    n.vm_id = units;
    n.units = units;
    n.mips = 1000.0;
    n.price_cents_s = 1.0;
    n.boot_time_s = 50;
    return n;
  };
  auto check_tree = [&](const std::vector<std::int64_t>& values, std::size_t groups) {
    GameTreeNode root;
    std::size_t next = 0;
    const std::size_t per_group = (values.size() + groups - 1) / groups;
    while (next < values.size()) {
      GameTreeNode inner;
      for (std::size_t k = 0; k < per_group && next < values.size(); ++k)
        inner.children.push_back(make_leaf(values[next++]));
      root.children.push_back(std::move(inner));
    }
    const SearchBound pruned =
        minimax_alpha_beta(2, true, root, lowest_bound(), highest_bound(), ctx);
    const double unpruned = plain_minimax_value(root, 2, true, ctx);
    ++cases;
    if (pruned.value != unpruned) ++mismatches;
  };

  // Every depth-2 shape up to 16 leaves: all 4-letter assignments up to 8
  // leaves, all 2-letter assignments beyond.
  for (std::size_t groups = 1; groups <= 4; ++groups) {
    for (std::size_t per = 1; per <= 4; ++per) {
      const std::size_t leaves = groups * per;
      const int alphabet = leaves <= 8 ? 4 : 2;
      std::vector<std::int64_t> values(leaves, 1);
      unsigned long long total = 1;
      for (std::size_t i = 0; i < leaves; ++i) total *= static_cast<unsigned long long>(alphabet);
      for (unsigned long long code = 0; code < total; ++code) {
        unsigned long long c = code;
        for (std::size_t i = 0; i < leaves; ++i) {
          values[i] = static_cast<std::int64_t>(c % alphabet) + 1;
          c /= alphabet;
        }
        check_tree(values, groups);
      }
    }
  }

  // Random larger trees with real-valued payloads.
  Rng rng(140);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<GameTreeNode> leaves;
    for (int i = 0; i < n; ++i) {
      GameTreeNode leaf;
      leaf.vm_id = i;
      leaf.units = rng.uniform_int(1, 9);
      leaf.mips = static_cast<double>(rng.uniform_int(1000, 190000));
      leaf.price_cents_s = rng.uniform_real(0.001, 0.2);
      leaf.boot_time_s = rng.uniform_int(30, 100);
      leaves.push_back(leaf);
    }
    EvalContext rctx;
    rctx.increase = rng.chance(0.5);
    rctx.demand_units = rng.uniform_int(1, 12);
    rctx.unit_mips = static_cast<double>(rng.uniform_int(1000, 3000));
    rctx.dependants = rng.uniform_int(1, 4);
    const GameTreeNode root = build_game_tree(leaves, 2);
    const SearchBound pruned =
        minimax_alpha_beta(2, true, root, lowest_bound(), highest_bound(), rctx);
    ++cases;
    if (pruned.value != plain_minimax_value(root, 2, true, rctx)) ++mismatches;
  }

  *cases_out = cases;
  std::ostringstream msg;
  msg << mismatches << " mismatches over " << cases << " trees";
  report(4, mismatches == 0, "alpha-beta equals unpruned minimax", msg.str());
}

void criterion5_feasibility_oracle(const CloudCatalog& cat) {
  Rng rng(150);
  long mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 12));
    StreamWorkflow wf;
    for (int i = 0; i < n; ++i)
      wf.services.push_back({"s" + std::to_string(i),
                             static_cast<double>(rng.uniform_int(1348, 2674)),
                             static_cast<double>(rng.uniform_int(1, 50)) / 100.0,
                             Mobility::movable, ""});
    wf.external_sources = {{"ex0", rng.uniform_int(1, 15), "amazon"}};
    wf.edges.push_back({"ex0", "s0", 1.0, EdgeMode::replica});
    for (int j = 1; j < n; ++j)
      wf.edges.push_back({"s" + std::to_string(rng.uniform_int(0, j - 1)), "s" + std::to_string(j),
                          1.0, EdgeMode::replica});
    Topology topo(wf);
    const RateState rates = compute_rates(topo, topo.initial_source_units());

    SchedulingPlan plan(n);
    for (int s = 0; s < n; ++s) {
      const int cloud = static_cast<int>(
          rng.uniform_int(0, static_cast<std::int64_t>(cat.clouds.size()) - 1));
      plan.of(s).cloud = cloud;
      const auto& offers = cat.clouds[static_cast<std::size_t>(cloud)].offers;
      // Deliberately under- or over-provisioned.
      const std::int64_t count = rng.uniform_int(0, 3);
      for (std::int64_t k = 0; k < count; ++k) {
        const int o = static_cast<int>(
            rng.uniform_int(0, static_cast<std::int64_t>(offers.size()) - 1));
        if (offer_eligible(offers[static_cast<std::size_t>(o)], topo.service(s), 1.0))
          plan.add_instance(s, cloud, o, 0);
      }
    }

    // Verbatim transcription of the feasibility loop: accumulate each
    // service's per-VM rates and compare against its input.
    bool oracle = true;
    for (int s = 0; s < n && oracle; ++s) {
      double total_dp_rate = 0.0;
      for (const auto& vm : plan.of(s).instances)
        total_dp_rate += vm_rate(topo.service(s), cat.offer(vm.cloud, vm.offer), 1.0);
      if (total_dp_rate < rates.in_mbps[static_cast<std::size_t>(s)]) oracle = false;
    }
    if (is_feasible(topo, plan, cat, rates) != oracle) ++mismatches;
  }
  std::ostringstream msg;
  msg << mismatches << " mismatches over 1000 random plans";
  report(5, mismatches == 0, "is_feasible matches the line-by-line feasibility check", msg.str());
}

void criterion6_ga_sanity(const CloudCatalog& cat) {
  // Elite trace on montage_25 with the experiment defaults.
  GeneratorConfig g;
  g.structure = WorkflowStructure::montage;
  g.size = WorkflowSize::small;
  g.seed = 11000;
  g.cloud_ids = cat.cloud_ids();
  const Topology topo(generate_workflow(g));
  const RateState rates = compute_rates(topo, topo.initial_source_units());
  long regressions = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GaParams p;
    p.rng_seed = seed;
    const EvolveResult r = evolve(topo, cat, rates, p);
    for (std::size_t i = 1; i < r.best_trace.size(); ++i)
      if (r.best_trace[i] > r.best_trace[i - 1] + 1e-12) ++regressions;
  }

  // Exhaustive optimum on a 2-service / 2-cloud / 3-offer instance.
  CloudCatalog tiny;
  tiny.clouds = {Cloud{"west",
                       {VmOffer{"w1", 2750.0, 0.0014, 50, false},
                        VmOffer{"w2", 5500.0, 0.0027, 50, false},
                        VmOffer{"w3", 11000.0, 0.0050, 50, false}}},
                 Cloud{"east",
                       {VmOffer{"e1", 2750.0, 0.0012, 50, false},
                        VmOffer{"e2", 5500.0, 0.0025, 50, false},
                        VmOffer{"e3", 11000.0, 0.0048, 50, false}}}};
  tiny.latency = Matrix(2);
  tiny.bandwidth = Matrix(2, 700.0);
  tiny.transfer_cost = Matrix(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (i != j) {
        tiny.latency.at(i, j) = 0.021;
        tiny.bandwidth.at(i, j) = 122.0;
        tiny.transfer_cost.at(i, j) = 0.013;
      }
  StreamWorkflow wf;
  wf.name = "tiny";
  wf.services = {{"a", 2750.0, 0.5, Mobility::movable, ""},
                 {"b", 2750.0, 0.5, Mobility::movable, ""}};
  wf.external_sources = {{"ex0", 5, "west"}};
  wf.edges = {{"ex0", "a", 1.0, EdgeMode::replica}, {"a", "b", 1.0, EdgeMode::replica}};
  const Topology tiny_topo(wf);
  const RateState tiny_rates = compute_rates(tiny_topo, {5});

  double optimum = std::numeric_limits<double>::infinity();
  std::vector<int> multiset;
  auto enumerate = [&](auto&& self, int service, int cloud, int from, std::int64_t covered,
                       std::int64_t demand, std::vector<std::vector<int>>& out) -> void {
    if (covered >= demand) {
      out.push_back(multiset);
      return;
    }
    if (multiset.size() >= 6) return;
    const auto& offers = tiny.clouds[static_cast<std::size_t>(cloud)].offers;
    for (int o = from; o < static_cast<int>(offers.size()); ++o) {
      multiset.push_back(o);
      self(self, service, cloud, o,
           covered + offer_units(offers[static_cast<std::size_t>(o)], tiny_topo.service(service),
                                 1.0),
           demand, out);
      multiset.pop_back();
    }
  };
  for (int ca = 0; ca < 2; ++ca) {
    for (int cb = 0; cb < 2; ++cb) {
      std::vector<std::vector<int>> ma, mb;
      enumerate(enumerate, 0, ca, 0, 0, demand_units(tiny_rates.in_mbps[0], 1.0), ma);
      enumerate(enumerate, 1, cb, 0, 0, demand_units(tiny_rates.in_mbps[1], 1.0), mb);
      for (const auto& a : ma)
        for (const auto& b : mb) {
          Chromosome c;
          c.genes = {Gene{ca, a}, Gene{cb, b}};
          optimum = std::min(optimum, fitness(c, tiny_topo, tiny, tiny_rates));
        }
    }
  }
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GaParams p;
    p.rng_seed = seed;
    const EvolveResult r = evolve(tiny_topo, tiny, tiny_rates, p);
    if (r.best.fitness_cents_s <= optimum + 1e-9) ++hits;
  }

  std::ostringstream msg;
  msg << regressions << " elite regressions over 10 seeds x 50 generations; exhaustive optimum hit "
      << hits << "/10 seeds on the tiny instance";
  report(6, regressions == 0 && hits >= 9, "elite never worsens; evolve finds the tiny optimum",
         msg.str());
}

bool close4(double got, double want) { return std::abs(got - want) <= 5e-4 * std::abs(want); }

void criterion7_formulas() {
  bool ok = true;
  std::ostringstream msg;

  // One 7000-MIPS machine processes 3 whole units of a 2000 MI/MB stream.
  const Service svc{"s", 2000.0, 0.5, Mobility::movable, ""};
  const double rate = vm_rate(svc, VmOffer{"m4.large", 7000.0, 0.0054, 50, false}, 1.0);
  if (!close4(rate, 3.0)) {
    ok = false;
    msg << " vm_rate=" << rate;
  }

  // Cross-cloud stream that fits in the link: full volume billed.
  const double unthrottled = effective_transfer_volume(100.0, 1.0, 122.0, 0.021) * 0.013;
  if (!close4(unthrottled, 1.3)) {
    ok = false;
    msg << " unthrottled=" << unthrottled;
  }
  // Oversized stream: travel ratio 2.480016 throttles the billed volume to
  // 120.9669 MB, 1.572570 cents.
  const double throttled = effective_transfer_volume(300.0, 1.0, 122.0, 0.021) * 0.013;
  if (!close4(throttled, 1.572570)) {
    ok = false;
    msg << " throttled=" << throttled;
  }

  // Candidate scoring: 3 achieved of 5 required units at 0.0054 cents and a
  // 50 s boot, shared across 2 dependants.
  GameTreeNode leaf;
  leaf.units = 3;
  leaf.mips = 7000.0;
  leaf.price_cents_s = 0.0054;
  leaf.boot_time_s = 50;
  const double score = evaluate_value(leaf, EvalContext{true, 5, 2000.0, 2});
  if (!close4(score, 187.4074)) {
    ok = false;
    msg << " evaluate=" << score;
  }

  // A 65% raise of a 5-unit source rounds 3.25 to 3 whole units.
  if (nearest_units(0.65 * 5.0, 1.0) != 3) {
    ok = false;
    msg << " rounding(3.25)=" << nearest_units(0.65 * 5.0, 1.0);
  }
  StreamWorkflow wf;
  wf.services = {{"a", 2000.0, 0.5, Mobility::movable, ""}};
  wf.external_sources = {{"ex0", 5, "west"}};
  wf.edges = {{"ex0", "a", 1.0, EdgeMode::replica}};
  const Topology topo(wf);
  const RateState rs = compute_rates(topo, {5});
  const RateState after = apply_velocity_change(rs, topo, 0, nearest_units(0.65 * 5.0, 1.0));
  if (after.source_units[0] != 8) {
    ok = false;
    msg << " new_rate=" << after.source_units[0];
  }

  report(7, ok, "formula spot checks at 4 significant figures",
         ok ? "vm rate, both transfer branches, candidate score, half-up rounding"
            : msg.str());
}

void criterion8_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "streamflow_acceptance_det";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  GeneratorConfig g;
  g.structure = WorkflowStructure::montage;
  g.size = WorkflowSize::small;
  g.seed = 11000;
  g.cloud_ids = {"amazon", "google", "azure"};
  save_workflow(generate_workflow(g), (dir / "wf.json").string());

  Scenario sc;
  sc.workflow_path = (dir / "wf.json").string();
  sc.catalog_path = kRepo + "/catalog/multicloud-default.json";
  sc.scheduler = SchedulerKind::adaptive;
  sc.horizon_s = 180;
  sc.seed = 77;
  sc.reps = 2;
  sc.event_spec.direction = Direction::increase;

  simulate_to_dir(sc, (dir / "a").string());
  simulate_to_dir(sc, (dir / "b").string());

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
  };
  bool ok = true;
  std::string first_diff;
  for (const char* name :
       {"run_0.csv", "run_1.csv", "events_0.csv", "events_1.csv", "mean.csv", "summary.json"}) {
    if (slurp(dir / "a" / name) != slurp(dir / "b" / name)) {
      ok = false;
      if (first_diff.empty()) first_diff = name;
    }
  }
  std::filesystem::remove_all(dir);
  report(8, ok, "re-running a scenario reproduces byte-identical reports",
         ok ? "run/events/mean/summary all match" : "first differing file: " + first_diff);
}

}  // namespace

int main() {
  try {
    const CloudCatalog cat = load_catalog(kRepo + "/catalog/multicloud-default.json");

    std::cout << "running the 12-workflow x 2-direction x 3-scheduler grid (10 reps, 180 s)..."
              << std::endl;
    const Grid grid = run_grid(cat);

    criterion1_cost_ordering(grid);
    criterion2_throughput(grid);
    criterion3_plan_changes(grid);
    unsigned long long pruning_cases = 0;
    criterion4_pruning(&pruning_cases);
    criterion5_feasibility_oracle(cat);
    criterion6_ga_sanity(cat);
    criterion7_formulas();
    criterion8_determinism();
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << std::endl;
    return 99;
  }
  return g_failures;
}
