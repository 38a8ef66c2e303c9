#include "streamflow/greedy.hpp"

#include <algorithm>
#include <cmath>

namespace streamflow {

double evaluate_value(const GameTreeNode& leaf, const EvalContext& ctx) {
  const double achieved = static_cast<double>(leaf.units);
  const double demand = static_cast<double>(ctx.demand_units);
  if (ctx.increase) {
    double value = achieved / (demand * leaf.price_cents_s) / static_cast<double>(leaf.boot_time_s);
    value += std::floor(leaf.mips / (ctx.unit_mips * static_cast<double>(ctx.dependants))) /
             leaf.price_cents_s;
    return value;
  }
  return achieved / (demand * leaf.price_cents_s);
}

GameTreeNode evaluate(GameTreeNode leaf, const EvalContext& ctx) {
  leaf.value = evaluate_value(leaf, ctx);
  return leaf;
}

GameTreeNode build_game_tree(std::vector<GameTreeNode> leaves, int depth) {
  GameTreeNode root;
  if (depth <= 1) {
    root.children = std::move(leaves);
    return root;
  }
  const auto n = leaves.size();
  const auto groups = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const auto per_group = (n + groups - 1) / groups;
  std::size_t next = 0;
  while (next < n) {
    GameTreeNode inner;
    for (std::size_t k = 0; k < per_group && next < n; ++k) inner.children.push_back(std::move(leaves[next++]));
    root.children.push_back(std::move(inner));
  }
  return root;
}

namespace {

// On equal values prefer the cheaper VM, then the lexicographically smaller
// label; keeps selections reproducible.
bool wins_tie(const SearchBound& a, const SearchBound& b) {
  if (a.node == nullptr || b.node == nullptr) return false;
  if (a.node->price_cents_s != b.node->price_cents_s)
    return a.node->price_cents_s < b.node->price_cents_s;
  if (a.node->label != nullptr && b.node->label != nullptr && *a.node->label != *b.node->label)
    return *a.node->label < *b.node->label;
  return false;
}

}  // namespace

SearchBound minimax_alpha_beta(int depth, bool maximizing, const GameTreeNode& node,
                               SearchBound alpha, SearchBound beta, const EvalContext& ctx) {
  if (depth == 0) return SearchBound{&node, evaluate_value(node, ctx)};

  if (maximizing) {
    for (const auto& child : node.children) {
      const SearchBound val = minimax_alpha_beta(depth - 1, false, child, alpha, beta, ctx);
      if (val.value > alpha.value || (val.value == alpha.value && wins_tie(val, alpha))) alpha = val;
      if (beta.value <= alpha.value) break;  // alpha cut-off
    }
    return alpha;
  }
  for (const auto& child : node.children) {
    const SearchBound val = minimax_alpha_beta(depth - 1, true, child, alpha, beta, ctx);
    if (val.value < beta.value || (val.value == beta.value && wins_tie(val, beta))) beta = val;
    if (beta.value <= alpha.value) break;  // beta cut-off
  }
  return beta;
}

std::int64_t extra_units(const Topology& topo, int service, const SchedulingPlan& plan,
                         const CloudCatalog& cat, const RateState& rates) {
  const std::int64_t capacity = ordered_capacity_units(topo, service, plan, cat);
  const std::int64_t required =
      demand_units(rates.in_mbps[static_cast<std::size_t>(service)], topo.unit_dp_rate());
  return capacity - required;
}

std::vector<int> increase_proc(const Topology& topo, int service, const SchedulingPlan& plan,
                               const CloudCatalog& cat, const RateState& rates,
                               std::int64_t theta_units, Rng& rng, int depth) {
  const Service& svc = topo.service(service);
  const double chi = unit_mips(svc, topo.unit_dp_rate());
  const int cloud = plan.of(service).cloud;
  const auto& offers = cat.clouds[static_cast<std::size_t>(cloud)].offers;

  std::vector<GameTreeNode> candidates;
  for (std::size_t o = 0; o < offers.size(); ++o) {
    if (offers[o].mips < chi) continue;
    GameTreeNode leaf;
    leaf.vm_id = static_cast<std::int64_t>(o);
    leaf.units = offer_units(offers[o], svc, topo.unit_dp_rate());
    leaf.mips = offers[o].mips;
    leaf.price_cents_s = offers[o].price_cents_s;
    leaf.boot_time_s = offers[o].boot_time_s;
    leaf.label = &offers[o].name;
    candidates.push_back(leaf);
  }
  if (candidates.empty())
    throw unschedulable_error("unschedulable increase: no eligible offer on cloud " +
                              cat.clouds[static_cast<std::size_t>(cloud)].id + " for service " +
                              svc.id);

  std::int64_t req_units = theta_units - extra_units(topo, service, plan, cat, rates);

  EvalContext ctx;
  ctx.increase = true;
  ctx.unit_mips = chi;
  ctx.dependants = std::max(1, topo.out_degree(service));

  std::vector<int> picked;
  while (req_units > 0) {
    rng.shuffle(candidates);
    const GameTreeNode root = build_game_tree(candidates, depth);
    ctx.demand_units = req_units;
    const SearchBound best =
        minimax_alpha_beta(depth, true, root, lowest_bound(), highest_bound(), ctx);
    picked.push_back(static_cast<int>(best.node->vm_id));
    req_units -= best.node->units;
  }
  return picked;
}

std::vector<std::int64_t> decrease_proc(const Topology& topo, int service,
                                        const SchedulingPlan& plan, const CloudCatalog& cat,
                                        const RateState& rates, std::int64_t theta_units,
                                        int depth) {
  const Service& svc = topo.service(service);
  const double chi = unit_mips(svc, topo.unit_dp_rate());

  std::vector<GameTreeNode> candidates;
  for (const auto& vm : plan.of(service).instances) {
    const VmOffer& offer = cat.offer(vm.cloud, vm.offer);
    GameTreeNode leaf;
    leaf.vm_id = vm.id;
    leaf.units = offer_units(offer, svc, topo.unit_dp_rate());
    leaf.mips = offer.mips;
    leaf.price_cents_s = offer.price_cents_s;
    leaf.boot_time_s = offer.boot_time_s;
    leaf.label = &offer.name;
    candidates.push_back(leaf);
  }

  std::int64_t red_units = theta_units + extra_units(topo, service, plan, cat, rates);

  EvalContext ctx;
  ctx.increase = false;
  ctx.unit_mips = chi;
  ctx.dependants = std::max(1, topo.out_degree(service));

  std::vector<std::int64_t> released;
  while (red_units > 0) {
    // Anything achieving more units than may be released must stay.
    std::erase_if(candidates,
                  [&](const GameTreeNode& leaf) { return leaf.units > red_units; });
    if (candidates.empty()) break;  // no provisioned VM can be deprovisioned
    const GameTreeNode root = build_game_tree(candidates, depth);
    ctx.demand_units = red_units;
    const SearchBound best =
        minimax_alpha_beta(depth, true, root, lowest_bound(), highest_bound(), ctx);
    const std::int64_t id = best.node->vm_id;
    released.push_back(id);
    red_units -= best.node->units;
    std::erase_if(candidates, [&](const GameTreeNode& leaf) { return leaf.vm_id == id; });
  }
  return released;
}

PlanDelta adaptive_handle_event(const Topology& topo, const CloudCatalog& cat,
                                const SchedulingPlan& plan, const VelocityImpact& impact, Rng& rng,
                                int depth) {
  PlanDelta delta;
  const bool increase = impact.delta_units > 0;
  for (int service : impact.affected) {
    const std::int64_t theta = impact.theta_units[static_cast<std::size_t>(service)];
    if (theta == 0) continue;
    if (increase) {
      for (int offer : increase_proc(topo, service, plan, cat, impact.before, theta, rng, depth))
        delta.provision.push_back(PlanDelta::Provision{service, plan.of(service).cloud, offer});
    } else {
      for (std::int64_t id : decrease_proc(topo, service, plan, cat, impact.before, theta, depth))
        delta.deprovision.push_back(PlanDelta::Deprovision{service, id});
    }
  }
  return delta;
}

}  // namespace streamflow
