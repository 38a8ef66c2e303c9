#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamflow/workflow.hpp"

namespace streamflow {

enum class WorkflowStructure { montage, inspiral, epigenomics, cybershake };
enum class WorkflowSize { small, medium, large };

WorkflowStructure structure_from_string(const std::string& s);  // throws config_error
WorkflowSize size_from_string(const std::string& s);
std::string to_string(WorkflowStructure s);

// Service count for a structure/size pair (montage 25/50/100, inspiral
// 30/50/100, epigenomics 24/46/100, cybershake 30/50/100).
int node_count(WorkflowStructure structure, WorkflowSize size);

struct GeneratorConfig {
  WorkflowStructure structure = WorkflowStructure::montage;
  WorkflowSize size = WorkflowSize::small;
  std::uint64_t seed = 1;
  std::vector<std::string> cloud_ids;  // where sources land and pins point
  std::int64_t initial_rate_units = 5;
  double min_dp_unit = 1.0;
  double unit_dp_rate = 1.0;
};

// Deterministic synthetic DAG with the structure's layered shape. Service
// parameters are drawn uniformly: mi_per_mb from [1348, 2674], gamma from
// 1-50% of input, half the services unmovable and pinned to their nearest
// source's cloud. Every root service is fed by its own external source; all
// edges run in replica mode.
StreamWorkflow generate_workflow(const GeneratorConfig& cfg);

}  // namespace streamflow
