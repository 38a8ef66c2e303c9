#include "streamflow/generator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "streamflow/rng.hpp"

namespace streamflow {

WorkflowStructure structure_from_string(const std::string& s) {
  if (s == "montage") return WorkflowStructure::montage;
  if (s == "inspiral") return WorkflowStructure::inspiral;
  if (s == "epigenomics") return WorkflowStructure::epigenomics;
  if (s == "cybershake") return WorkflowStructure::cybershake;
  throw config_error("unknown workflow structure: " + s);
}

WorkflowSize size_from_string(const std::string& s) {
  if (s == "small") return WorkflowSize::small;
  if (s == "medium") return WorkflowSize::medium;
  if (s == "large") return WorkflowSize::large;
  throw config_error("unknown workflow size: " + s);
}

std::string to_string(WorkflowStructure s) {
  switch (s) {
    case WorkflowStructure::montage: return "montage";
    case WorkflowStructure::inspiral: return "inspiral";
    case WorkflowStructure::epigenomics: return "epigenomics";
    case WorkflowStructure::cybershake: return "cybershake";
  }
  return "?";
}

int node_count(WorkflowStructure structure, WorkflowSize size) {
  switch (structure) {
    case WorkflowStructure::montage:
      return size == WorkflowSize::small ? 25 : size == WorkflowSize::medium ? 50 : 100;
    case WorkflowStructure::inspiral:
      return size == WorkflowSize::small ? 30 : size == WorkflowSize::medium ? 50 : 100;
    case WorkflowStructure::epigenomics:
      return size == WorkflowSize::small ? 24 : size == WorkflowSize::medium ? 46 : 100;
    case WorkflowStructure::cybershake:
      return size == WorkflowSize::small ? 30 : size == WorkflowSize::medium ? 50 : 100;
  }
  return 0;
}

namespace {

struct LayerShape {
  std::vector<double> fractions;  // relative layer widths, head first
  int min_parents;
  int max_parents;
  bool funnel_layers;  // narrow layers take every node of the previous layer
};

// Layer proportions echo the classic shapes: montage aggregates a wide
// projection stage through a bottleneck, inspiral fans many detector chains
// into a short merge tail, epigenomics runs parallel pipelines, cybershake
// fans a couple of inputs wide and collects at the end.
LayerShape shape_of(WorkflowStructure s) {
  switch (s) {
    case WorkflowStructure::montage:
      return {{0.24, 0.30, 0.04, 0.26, 0.12, 0.04}, 1, 3, true};
    case WorkflowStructure::inspiral:
      return {{0.34, 0.28, 0.22, 0.10, 0.06}, 1, 2, false};
    case WorkflowStructure::epigenomics:
      return {{0.17, 0.17, 0.17, 0.17, 0.16, 0.12, 0.04}, 1, 1, true};
    case WorkflowStructure::cybershake:
      return {{0.10, 0.42, 0.38, 0.10}, 1, 2, true};
  }
  return {{1.0}, 1, 1, false};
}

std::vector<int> layer_sizes(const LayerShape& shape, int n) {
  const auto layers = shape.fractions.size();
  std::vector<int> sizes(layers, 1);
  int assigned = static_cast<int>(layers);
  // Largest-remainder rounding of the fractions, every layer keeps >= 1 node.
  std::vector<std::pair<double, std::size_t>> rema;
  for (std::size_t i = 0; i < layers; ++i) {
    const double want = shape.fractions[i] * n;
    const int extra = std::max(0, static_cast<int>(std::floor(want)) - 1);
    sizes[i] += extra;
    assigned += extra;
    rema.emplace_back(want - std::floor(want), i);
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) sizes[rema[k % layers].second] += 1;
  while (assigned > n) {  // shapes with more layers than nodes
    for (std::size_t i = layers; i-- > 0 && assigned > n;) {
      if (sizes[i] > 1) {
        --sizes[i];
        --assigned;
      }
    }
  }
  return sizes;
}

}  // namespace

StreamWorkflow generate_workflow(const GeneratorConfig& cfg) {
  if (cfg.cloud_ids.empty()) throw config_error("generator needs at least one cloud id");
  const int n = node_count(cfg.structure, cfg.size);
  Rng rng(mix_seed(cfg.seed, 0x77666c6full));  // "wflo"

  StreamWorkflow wf;
  wf.name = to_string(cfg.structure) + "_" + std::to_string(n);
  wf.min_dp_unit = cfg.min_dp_unit;
  wf.unit_dp_rate = cfg.unit_dp_rate;

  const LayerShape shape = shape_of(cfg.structure);
  const std::vector<int> sizes = layer_sizes(shape, n);

  std::vector<std::vector<int>> layers;
  int next_id = 0;
  for (int width : sizes) {
    std::vector<int> layer;
    for (int k = 0; k < width; ++k) layer.push_back(next_id++);
    layers.push_back(std::move(layer));
  }

  for (int i = 0; i < n; ++i) {
    Service s;
    s.id = "s" + std::to_string(i);
    s.mi_per_mb = static_cast<double>(rng.uniform_int(1348, 2674));
    s.gamma = static_cast<double>(rng.uniform_int(1, 50)) / 100.0;
    wf.services.push_back(std::move(s));
  }

  // Wire each non-root layer to the previous one. Funnel layers (aggregation
  // bottlenecks) absorb every node above them; otherwise nodes draw 1..max
  // distinct parents. Unused parents get one extra child so nothing dangles.
  for (std::size_t li = 1; li < layers.size(); ++li) {
    const auto& prev = layers[li - 1];
    const auto& cur = layers[li];
    std::vector<char> parent_used(prev.size(), 0);
    const bool funnel = shape.funnel_layers && cur.size() * 2 <= prev.size() && cur.size() <= 3;
    for (std::size_t ci = 0; ci < cur.size(); ++ci) {
      if (funnel) {
        // Split the previous layer across the funnel nodes.
        for (std::size_t pi = ci; pi < prev.size(); pi += cur.size()) {
          wf.edges.push_back(Edge{wf.services[static_cast<std::size_t>(prev[pi])].id,
                                  wf.services[static_cast<std::size_t>(cur[ci])].id, 1.0,
                                  EdgeMode::replica});
          parent_used[pi] = 1;
        }
        continue;
      }
      const int want = static_cast<int>(rng.uniform_int(
          shape.min_parents,
          std::min<std::int64_t>(shape.max_parents, static_cast<std::int64_t>(prev.size()))));
      std::vector<int> pool(prev.size());
      for (std::size_t k = 0; k < prev.size(); ++k) pool[k] = static_cast<int>(k);
      rng.shuffle(pool);
      for (int k = 0; k < want; ++k) {
        wf.edges.push_back(Edge{wf.services[static_cast<std::size_t>(prev[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])])].id,
                                wf.services[static_cast<std::size_t>(cur[ci])].id, 1.0,
                                EdgeMode::replica});
        parent_used[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])] = 1;
      }
    }
    if (!funnel) {
      for (std::size_t pi = 0; pi < prev.size(); ++pi) {
        if (parent_used[pi]) continue;
        const int child = cur[static_cast<std::size_t>(rng.uniform_int(
            0, static_cast<std::int64_t>(cur.size()) - 1))];
        wf.edges.push_back(Edge{wf.services[static_cast<std::size_t>(prev[pi])].id,
                                wf.services[static_cast<std::size_t>(child)].id, 1.0,
                                EdgeMode::replica});
      }
    }
  }

  // One external source per root service.
  const auto& roots = layers.front();
  for (std::size_t r = 0; r < roots.size(); ++r) {
    ExternalSource x;
    x.id = "ex" + std::to_string(r);
    x.rate_units = cfg.initial_rate_units;
    x.location_cloud = cfg.cloud_ids[static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<std::int64_t>(cfg.cloud_ids.size()) - 1))];
    wf.external_sources.push_back(x);
    wf.edges.push_back(Edge{x.id, wf.services[static_cast<std::size_t>(roots[r])].id, 1.0,
                            EdgeMode::replica});
  }

  // Half the services process data where it lands: pin them to the nearest
  // upstream source's cloud.
  {
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    std::vector<int> direct_source(static_cast<std::size_t>(n), -1);
    for (const auto& e : wf.edges) {
      if (e.origin.rfind("ex", 0) == 0) {
        const int src = std::stoi(e.origin.substr(2));
        const int dst = std::stoi(e.destination.substr(1));
        direct_source[static_cast<std::size_t>(dst)] = src;
      } else {
        parents[static_cast<std::size_t>(std::stoi(e.destination.substr(1)))].push_back(
            std::stoi(e.origin.substr(1)));
      }
    }
    auto nearest_source_cloud = [&](int service) -> std::string {
      std::deque<int> q{service};
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      seen[static_cast<std::size_t>(service)] = 1;
      while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        if (direct_source[static_cast<std::size_t>(u)] >= 0)
          return wf.external_sources[static_cast<std::size_t>(direct_source[static_cast<std::size_t>(u)])]
              .location_cloud;
        for (int p : parents[static_cast<std::size_t>(u)]) {
          if (!seen[static_cast<std::size_t>(p)]) {
            seen[static_cast<std::size_t>(p)] = 1;
            q.push_back(p);
          }
        }
      }
      return cfg.cloud_ids.front();
    };

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    for (int k = 0; k < n / 2; ++k) {
      Service& s = wf.services[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
      s.mobility = Mobility::unmovable;
      s.pinned_cloud = nearest_source_cloud(order[static_cast<std::size_t>(k)]);
    }
  }

  return wf;
}

}  // namespace streamflow
