#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streamflow/catalog.hpp"
#include "streamflow/cost.hpp"
#include "streamflow/plan.hpp"
#include "streamflow/rng.hpp"
#include "streamflow/workflow.hpp"

namespace streamflow {

// Node of the VM-selection game tree. Internal nodes carry the -1 sentinel id;
// leaves carry one candidate VM (an offer for provisioning, an instance for
// release).
struct GameTreeNode {
  std::int64_t vm_id = -1;
  double value = 0.0;
  std::int64_t units = 0;  // whole processing units the VM achieves
  double mips = 0.0;
  double price_cents_s = 0.0;
  std::int64_t boot_time_s = 0;
  const std::string* label = nullptr;  // offer name, used for tie-breaking
  std::vector<GameTreeNode> children;

  bool is_leaf() const { return children.empty(); }
};

struct EvalContext {
  bool increase = true;
  std::int64_t demand_units = 0;  // units still required (increase) or reducible (decrease)
  double unit_mips = 0.0;
  std::int64_t dependants = 1;  // service out-degree, floored at 1
};

// Scores one candidate VM. Increase requests reward cheap fast-booting
// capacity plus headroom shared across the service's dependants; decrease
// requests score released units per cent.
double evaluate_value(const GameTreeNode& leaf, const EvalContext& ctx);
GameTreeNode evaluate(GameTreeNode leaf, const EvalContext& ctx);

// Leaves are grouped left-to-right under ceil(sqrt(n)) minimizing nodes below
// a single maximizing root (depth 2), so pruning has something to cut.
GameTreeNode build_game_tree(std::vector<GameTreeNode> leaves, int depth = 2);

struct SearchBound {
  const GameTreeNode* node = nullptr;
  double value = 0.0;
};

inline SearchBound lowest_bound() { return {nullptr, -std::numeric_limits<double>::infinity()}; }
inline SearchBound highest_bound() { return {nullptr, std::numeric_limits<double>::infinity()}; }

// Alpha-beta recursion over a uniform-depth tree; depth-0 nodes are evaluated
// leaves. Returns the winning leaf so the VM id is recoverable. Ties on value
// break toward lower price, then lexicographic label.
SearchBound minimax_alpha_beta(int depth, bool maximizing, const GameTreeNode& node,
                               SearchBound alpha, SearchBound beta, const EvalContext& ctx);

// Whole units the service has provisioned beyond what its current input
// needs. Counts ordered capacity (booting instances included) so back-to-back
// events never double-provision.
std::int64_t extra_units(const Topology& topo, int service, const SchedulingPlan& plan,
                         const CloudCatalog& cat, const RateState& rates);

// Offers to provision from the service's placement cloud so the input-rate
// increase of theta_units is covered. Throws unschedulable_error when the
// placement cloud has no eligible offer.
std::vector<int> increase_proc(const Topology& topo, int service, const SchedulingPlan& plan,
                               const CloudCatalog& cat, const RateState& rates,
                               std::int64_t theta_units, Rng& rng, int depth = 2);

// Instances to release after an input-rate decrease of theta_units; never
// releases capacity the remaining input still needs. May return fewer (or no)
// instances when nothing can be released.
std::vector<std::int64_t> decrease_proc(const Topology& topo, int service,
                                        const SchedulingPlan& plan, const CloudCatalog& cat,
                                        const RateState& rates, std::int64_t theta_units,
                                        int depth = 2);

// Level 1 walks the services downstream of the changed source in topological
// order; level 2 runs the per-service increase/decrease procedure with that
// service's own unit delta. One event per call.
PlanDelta adaptive_handle_event(const Topology& topo, const CloudCatalog& cat,
                                const SchedulingPlan& plan, const VelocityImpact& impact, Rng& rng,
                                int depth = 2);

}  // namespace streamflow
