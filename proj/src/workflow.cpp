#include "streamflow/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

namespace streamflow {

namespace {

using nlohmann::json;

bool is_service_id(const StreamWorkflow& wf, const std::string& id) {
  return std::any_of(wf.services.begin(), wf.services.end(),
                     [&](const Service& s) { return s.id == id; });
}

bool is_source_id(const StreamWorkflow& wf, const std::string& id) {
  return std::any_of(wf.external_sources.begin(), wf.external_sources.end(),
                     [&](const ExternalSource& s) { return s.id == id; });
}

std::string pct(double fraction) {
  std::ostringstream os;
  os << fraction * 100.0 << "%";
  return os.str();
}

}  // namespace

std::vector<Violation> validate(const StreamWorkflow& wf) {
  std::vector<Violation> out;
  auto add = [&](std::string entity, std::string rule, std::string detail) {
    out.push_back(Violation{std::move(entity), std::move(rule), std::move(detail)});
  };

  if (!(wf.min_dp_unit > 0.0))
    add(wf.name.empty() ? "workflow" : wf.name, "min-dp-unit", "min_dp_unit must be > 0");
  if (!(wf.unit_dp_rate > 0.0))
    add(wf.name.empty() ? "workflow" : wf.name, "unit-dp-rate", "unit_dp_rate must be > 0");

  for (const auto& s : wf.services) {
    if (!(s.mi_per_mb > 0.0)) add(s.id, "mi-per-mb", "mi_per_mb must be > 0");
    if (s.gamma < 0.0 || s.gamma > 1.0) add(s.id, "gamma-range", "gamma must be in [0, 1]");
    if (s.mobility == Mobility::unmovable && s.pinned_cloud.empty())
      add(s.id, "unmovable-pin", "unmovable service needs a pinned cloud");
  }
  for (const auto& x : wf.external_sources) {
    if (x.rate_units < 0) add(x.id, "source-rate", "rate must be >= 0 whole units");
    if (x.location_cloud.empty()) add(x.id, "source-location", "location cloud missing");
  }

  // Duplicate ids.
  {
    std::vector<std::string> ids;
    for (const auto& s : wf.services) ids.push_back(s.id);
    for (const auto& x : wf.external_sources) ids.push_back(x.id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 1; i < ids.size(); ++i)
      if (ids[i] == ids[i - 1]) add(ids[i], "duplicate-id", "id used more than once");
  }

  for (const auto& e : wf.edges) {
    const bool origin_ok = is_service_id(wf, e.origin) || is_source_id(wf, e.origin);
    if (!origin_ok) add(e.origin, "unknown-endpoint", "edge origin not declared");
    if (!is_service_id(wf, e.destination))
      add(e.destination, "unknown-endpoint", "edge destination is not a declared service");
    if (!(e.percent > 0.0) || e.percent > 1.0)
      add(e.origin + "->" + e.destination, "percent-range", "edge percent must be in (0, 1]");
    if (e.mode == EdgeMode::replica && e.percent != 1.0)
      add(e.origin + "->" + e.destination, "replica-percent",
          "replica edge must carry 100%, has " + pct(e.percent));
  }

  // Per-origin mode consistency and partition sums. Only one mode is allowed
  // per emitting origin; partition percents must sum to 100%.
  {
    std::vector<std::string> origins;
    for (const auto& e : wf.edges) origins.push_back(e.origin);
    std::sort(origins.begin(), origins.end());
    origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
    for (const auto& origin : origins) {
      double sum = 0.0;
      bool has_replica = false, has_partition = false;
      for (const auto& e : wf.edges) {
        if (e.origin != origin) continue;
        sum += e.percent;
        (e.mode == EdgeMode::replica ? has_replica : has_partition) = true;
      }
      if (has_replica && has_partition)
        add(origin, "mixed-mode", "origin mixes replica and partition edges");
      if (has_partition && !has_replica && std::abs(sum - 1.0) > 1e-9)
        add(origin, "partition-sum", "partition percents sum " + pct(sum) + " != 100%");
    }
  }

  // Cycle detection over service-to-service edges (Kahn).
  {
    std::unordered_map<std::string, int> idx;
    for (std::size_t i = 0; i < wf.services.size(); ++i)
      idx[wf.services[i].id] = static_cast<int>(i);
    const int n = static_cast<int>(wf.services.size());
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : wf.edges) {
      auto a = idx.find(e.origin);
      auto b = idx.find(e.destination);
      if (a == idx.end() || b == idx.end()) continue;
      adj[static_cast<std::size_t>(a->second)].push_back(b->second);
      ++indeg[static_cast<std::size_t>(b->second)];
    }
    std::deque<int> q;
    for (int i = 0; i < n; ++i)
      if (indeg[static_cast<std::size_t>(i)] == 0) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      ++seen;
      for (int v : adj[static_cast<std::size_t>(u)])
        if (--indeg[static_cast<std::size_t>(v)] == 0) q.push_back(v);
    }
    if (seen != n)
      add(wf.name.empty() ? "workflow" : wf.name, "cycle", "cycle detected among services");
  }

  return out;
}

Topology::Topology(StreamWorkflow wf) : wf_(std::move(wf)) {
  auto violations = validate(wf_);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid workflow";
    if (!wf_.name.empty()) os << " '" << wf_.name << "'";
    os << ":";
    for (const auto& v : violations) os << "\n  [" << v.rule << "] " << v.entity << ": " << v.detail;
    throw config_error(os.str());
  }

  const int n = service_count();
  for (int i = 0; i < n; ++i) service_idx_[wf_.services[static_cast<std::size_t>(i)].id] = i;
  for (int i = 0; i < source_count(); ++i)
    source_idx_[wf_.external_sources[static_cast<std::size_t>(i)].id] = i;

  parents_.resize(static_cast<std::size_t>(n));
  source_feeds_.resize(static_cast<std::size_t>(n));
  children_.resize(static_cast<std::size_t>(n));
  source_children_.resize(static_cast<std::size_t>(source_count()));

  for (const auto& e : wf_.edges) {
    const int dest = service_idx_.at(e.destination);
    if (auto it = service_idx_.find(e.origin); it != service_idx_.end()) {
      parents_[static_cast<std::size_t>(dest)].push_back(ServiceFeed{it->second, e.percent});
      children_[static_cast<std::size_t>(it->second)].push_back(ChildLink{dest, e.percent});
    } else {
      const int src = source_idx_.at(e.origin);
      source_feeds_[static_cast<std::size_t>(dest)].push_back(SourceFeed{src, e.percent});
      source_children_[static_cast<std::size_t>(src)].push_back(ChildLink{dest, e.percent});
    }
  }

  // Kahn topological order; ties broken by service index for determinism.
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    indeg[static_cast<std::size_t>(i)] = static_cast<int>(parents_[static_cast<std::size_t>(i)].size());
  std::deque<int> q;
  for (int i = 0; i < n; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0) q.push_back(i);
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    topo_order_.push_back(u);
    for (const auto& c : children_[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(c.child)] == 0) q.push_back(c.child);
  }
}

int Topology::service_index(const std::string& id) const {
  auto it = service_idx_.find(id);
  if (it == service_idx_.end()) throw error("unknown service id: " + id);
  return it->second;
}

int Topology::source_index(const std::string& id) const {
  auto it = source_idx_.find(id);
  if (it == source_idx_.end()) throw error("unknown external source id: " + id);
  return it->second;
}

double Topology::lambda_of(int service, const std::vector<std::int64_t>& source_rate_units) const {
  double sum = 0.0;
  for (const auto& f : source_feeds_[static_cast<std::size_t>(service)]) {
    const double rate =
        static_cast<double>(source_rate_units[static_cast<std::size_t>(f.source)]) * wf_.min_dp_unit;
    sum += rate * f.percent;
  }
  return sum;
}

double Topology::lambda_of(int service) const { return lambda_of(service, initial_source_units()); }

std::vector<int> Topology::downstream_of(int source) const {
  std::vector<char> reach(static_cast<std::size_t>(service_count()), 0);
  std::deque<int> q;
  for (const auto& c : source_children_[static_cast<std::size_t>(source)]) {
    if (!reach[static_cast<std::size_t>(c.child)]) {
      reach[static_cast<std::size_t>(c.child)] = 1;
      q.push_back(c.child);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (const auto& c : children_[static_cast<std::size_t>(u)]) {
      if (!reach[static_cast<std::size_t>(c.child)]) {
        reach[static_cast<std::size_t>(c.child)] = 1;
        q.push_back(c.child);
      }
    }
  }
  std::vector<int> out;
  for (int s : topo_order_)
    if (reach[static_cast<std::size_t>(s)]) out.push_back(s);
  return out;
}

std::vector<std::int64_t> Topology::initial_source_units() const {
  std::vector<std::int64_t> units;
  units.reserve(wf_.external_sources.size());
  for (const auto& x : wf_.external_sources) units.push_back(x.rate_units);
  return units;
}

namespace {

EdgeMode mode_from_string(const std::string& s) {
  if (s == "replica") return EdgeMode::replica;
  if (s == "partition") return EdgeMode::partition;
  throw config_error("unknown edge mode: " + s);
}

Mobility mobility_from_string(const std::string& s) {
  if (s == "movable") return Mobility::movable;
  if (s == "unmovable") return Mobility::unmovable;
  throw config_error("unknown mobility: " + s);
}

}  // namespace

StreamWorkflow parse_workflow(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("workflow file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw config_error("unsupported workflow format_version");
    StreamWorkflow wf;
    wf.name = j.value("name", "");
    wf.min_dp_unit = j.value("min_dp_unit_mb", 1.0);
    wf.unit_dp_rate = j.value("unit_dp_rate_mbps", 1.0);
    for (const auto& js : j.at("services")) {
      Service s;
      s.id = js.at("id").get<std::string>();
      s.mi_per_mb = js.at("mi_per_mb").get<double>();
      s.gamma = js.at("gamma").get<double>();
      s.mobility = mobility_from_string(js.value("mobility", "movable"));
      s.pinned_cloud = js.value("pinned_cloud", "");
      wf.services.push_back(std::move(s));
    }
    for (const auto& jx : j.at("external_sources")) {
      ExternalSource x;
      x.id = jx.at("id").get<std::string>();
      x.rate_units = jx.at("rate_units").get<std::int64_t>();
      x.location_cloud = jx.at("location_cloud").get<std::string>();
      wf.external_sources.push_back(std::move(x));
    }
    for (const auto& je : j.at("edges")) {
      Edge e;
      e.origin = je.at("from").get<std::string>();
      e.destination = je.at("to").get<std::string>();
      e.percent = je.value("percent", 1.0);
      e.mode = mode_from_string(je.value("mode", "replica"));
      wf.edges.push_back(std::move(e));
    }
    return wf;
  } catch (const json::exception& e) {
    throw config_error(std::string("workflow schema error: ") + e.what());
  }
}

StreamWorkflow load_workflow(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("workflow file not found: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_workflow(buf.str());
}

std::string workflow_to_json(const StreamWorkflow& wf) {
  json j;
  j["format_version"] = 1;
  j["name"] = wf.name;
  j["min_dp_unit_mb"] = wf.min_dp_unit;
  j["unit_dp_rate_mbps"] = wf.unit_dp_rate;
  j["services"] = json::array();
  for (const auto& s : wf.services) {
    json js;
    js["id"] = s.id;
    js["mi_per_mb"] = s.mi_per_mb;
    js["gamma"] = s.gamma;
    js["mobility"] = s.mobility == Mobility::movable ? "movable" : "unmovable";
    if (!s.pinned_cloud.empty()) js["pinned_cloud"] = s.pinned_cloud;
    j["services"].push_back(std::move(js));
  }
  j["external_sources"] = json::array();
  for (const auto& x : wf.external_sources) {
    json jx;
    jx["id"] = x.id;
    jx["rate_units"] = x.rate_units;
    jx["location_cloud"] = x.location_cloud;
    j["external_sources"].push_back(std::move(jx));
  }
  j["edges"] = json::array();
  for (const auto& e : wf.edges) {
    json je;
    je["from"] = e.origin;
    je["to"] = e.destination;
    je["percent"] = e.percent;
    je["mode"] = e.mode == EdgeMode::replica ? "replica" : "partition";
    j["edges"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

void save_workflow(const StreamWorkflow& wf, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw config_error("cannot write workflow file: " + path);
  f << workflow_to_json(wf);
}

}  // namespace streamflow
