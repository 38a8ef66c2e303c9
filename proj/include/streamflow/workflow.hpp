#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamflow/errors.hpp"

namespace streamflow {

enum class Mobility { movable, unmovable };

// How a parent's output stream is routed to its children: replica duplicates
// the full stream on every child edge, partition splits it by percentages.
enum class EdgeMode { replica, partition };

struct Service {
  std::string id;
  double mi_per_mb = 0.0;  // compute demand for one MB of input (MI/MB)
  double gamma = 0.0;      // output-to-input proportion, in [0, 1]
  Mobility mobility = Mobility::movable;
  std::string pinned_cloud;  // required when unmovable
};

struct ExternalSource {
  std::string id;
  std::int64_t rate_units = 0;  // output rate, whole min_dp_unit quanta per second
  std::string location_cloud;   // cloud where this source's data lands
};

struct Edge {
  std::string origin;       // external source id or service id
  std::string destination;  // service id
  double percent = 1.0;     // fraction of the origin's output routed here, (0, 1]
  EdgeMode mode = EdgeMode::replica;
};

struct StreamWorkflow {
  std::string name;
  std::vector<Service> services;
  std::vector<ExternalSource> external_sources;
  std::vector<Edge> edges;
  double min_dp_unit = 1.0;   // stream quantum (MB); source rates are multiples of it
  double unit_dp_rate = 1.0;  // minimum per-VM processing rate (MB/s)
};

struct Violation {
  std::string entity;
  std::string rule;
  std::string detail;
};

// Structural and invariant checks. Violations are data, not faults: an empty
// list means the workflow is well-formed.
std::vector<Violation> validate(const StreamWorkflow& wf);

// Immutable indexed view over a validated workflow. Everything downstream
// (cost engine, schedulers, simulator) works against this; it is safe to
// share read-only across threads.
class Topology {
 public:
  struct ServiceFeed {
    int parent;      // service index
    double percent;  // edge fraction
  };
  struct SourceFeed {
    int source;      // external source index
    double percent;
  };
  struct ChildLink {
    int child;
    double percent;
  };

  // Throws config_error listing all violations if the workflow is invalid.
  explicit Topology(StreamWorkflow wf);

  const StreamWorkflow& workflow() const { return wf_; }
  int service_count() const { return static_cast<int>(wf_.services.size()); }
  int source_count() const { return static_cast<int>(wf_.external_sources.size()); }
  const Service& service(int i) const { return wf_.services[static_cast<std::size_t>(i)]; }
  const ExternalSource& source(int i) const {
    return wf_.external_sources[static_cast<std::size_t>(i)];
  }
  double min_dp_unit() const { return wf_.min_dp_unit; }
  double unit_dp_rate() const { return wf_.unit_dp_rate; }

  int service_index(const std::string& id) const;  // throws error on unknown id
  int source_index(const std::string& id) const;

  // Service indices ordered parents-before-children.
  const std::vector<int>& topo_order() const { return topo_order_; }
  const std::vector<ServiceFeed>& parents_of(int service) const {
    return parents_[static_cast<std::size_t>(service)];
  }
  const std::vector<SourceFeed>& source_feeds_of(int service) const {
    return source_feeds_[static_cast<std::size_t>(service)];
  }
  const std::vector<ChildLink>& children_of(int service) const {
    return children_[static_cast<std::size_t>(service)];
  }
  // Number of service-to-service edges leaving the service.
  int out_degree(int service) const {
    return static_cast<int>(children_[static_cast<std::size_t>(service)].size());
  }

  // Data rate arriving at the service straight from external sources, MB/s,
  // each edge scaled by its percent. Uses the workflow's stored source rates.
  double lambda_of(int service) const;
  double lambda_of(int service, const std::vector<std::int64_t>& source_rate_units) const;

  // All services reachable from the source, in topological order, no
  // duplicates. Directly fed services come first by construction.
  std::vector<int> downstream_of(int source) const;

  // Initial source rates as stored in the workflow file.
  std::vector<std::int64_t> initial_source_units() const;

 private:
  StreamWorkflow wf_;
  std::unordered_map<std::string, int> service_idx_;
  std::unordered_map<std::string, int> source_idx_;
  std::vector<std::vector<ServiceFeed>> parents_;
  std::vector<std::vector<SourceFeed>> source_feeds_;
  std::vector<std::vector<ChildLink>> children_;
  std::vector<std::vector<ChildLink>> source_children_;  // per source
  std::vector<int> topo_order_;
};

// Workflow file format (JSON, format_version 1). See README for the schema.
StreamWorkflow load_workflow(const std::string& path);
StreamWorkflow parse_workflow(const std::string& json_text);
std::string workflow_to_json(const StreamWorkflow& wf);
void save_workflow(const StreamWorkflow& wf, const std::string& path);

}  // namespace streamflow
