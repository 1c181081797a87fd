/* Copyright 2026 The dcce Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "procurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

namespace {

// Relative slack on cap budgets; the retention option at eta = 1 lands on
// the iso-carbon budget up to rounding.
constexpr double kCapSlack = 1e-12;

bool within(double value, double budget) { return value <= budget + kCapSlack * std::abs(budget); }

bool ranks_before(const ProcurementOption& a, const ProcurementOption& b) {
  if (a.profit != b.profit) return a.profit > b.profit;
  if (a.footprint != b.footprint) return a.footprint < b.footprint;
  if (a.platform_id != b.platform_id) return a.platform_id < b.platform_id;
  return !a.decommission && b.decommission;
}

std::string describe(const ProcurementOption& option) {
  return option.platform_id + (option.decommission ? " (upgrade)" : " (extend)");
}

ProcurementPlan to_plan(const ProcurementOption& option) {
  ProcurementPlan plan;
  plan.chosen_platform = option.platform_id;
  plan.decommission = option.decommission;
  plan.device_count = option.device_count;
  plan.profit = option.profit;
  plan.footprint = option.footprint;
  plan.max_growth = option.max_growth;
  return plan;
}

const ProcurementOption* best_of(const OptionSet& set, const CapPolicy& cap) {
  const ProcurementOption* best = nullptr;
  for (const auto& option : set.options) {
    if (cap_violation(option, set, cap)) continue;
    if (best == nullptr || ranks_before(option, *best)) best = &option;
  }
  return best;
}

}  // namespace

std::string_view to_string(CapPolicy::Kind kind) {
  switch (kind) {
    case CapPolicy::Kind::kNone: return "none";
    case CapPolicy::Kind::kIsoCarbon: return "iso-carbon";
    case CapPolicy::Kind::kIsoPower: return "iso-power";
    case CapPolicy::Kind::kAbsoluteCarbon: return "absolute-carbon";
  }
  return "unknown";
}

CapPolicy parse_cap(std::string_view text) {
  if (text == "none") return CapPolicy::none();
  if (text == "iso-carbon") return CapPolicy::iso_carbon();
  if (text == "iso-power") return CapPolicy::iso_power();
  if (text.starts_with("abs:")) {
    const auto number = text.substr(4);
    double kg = 0.0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), kg);
    if (ec != std::errc() || ptr != number.data() + number.size() || !(kg > 0.0)) {
      throw InvalidInput("absolute cap needs a positive budget in kg, got '" + std::string(number) + "'");
    }
    return CapPolicy::absolute(kg);
  }
  throw InvalidInput("unknown cap '" + std::string(text) + "' (none|iso-carbon|iso-power|abs:<kg>)");
}

OptionSet evaluate_options(const DeploymentScenario& base, std::span<const Candidate> candidates,
                           const Context& context, double eta) {
  if (candidates.empty()) throw InvalidInput("at least one candidate platform is required");
  if (!(eta >= 1.0)) throw InvalidInput("demand growth must be at least 1");
  context.validate();

  const auto& legacy = base.baseline;
  OptionSet set;
  set.eta = eta;
  set.baseline_power_w = static_cast<double>(legacy.count) * legacy.platform.tdp_w * legacy.utilization;

  for (const auto& candidate : candidates) {
    DeploymentScenario scenario = base;
    scenario.candidate = candidate.platform;
    scenario.workload = candidate.workload;
    scenario.validate();
    const auto costs = scenario_costs(scenario, context, CarbonPrices::from_context(context));
    set.baseline_cfp = costs.baseline.opex_cfp;
    const double goal = carbon_goal(costs, context);

    for (bool decommission : {true, false}) {
      ProcurementOption option;
      option.platform_id = candidate.platform.id;
      option.decommission = decommission;
      option.device_count = costs.devices * (decommission ? eta : eta - 1.0);
      option.profit = net_profit(costs, base.gross_income, eta, decommission);
      option.footprint = carbon_footprint(costs, eta, decommission);
      option.power_w = candidate.platform.tdp_w * option.device_count * legacy.utilization;
      if (!decommission) option.power_w += set.baseline_power_w;
      option.max_growth = max_sustainable_growth(costs, goal, decommission);
      option.costs = costs;
      set.options.push_back(std::move(option));
    }
  }
  return set;
}

std::optional<std::string> cap_violation(const ProcurementOption& option, const OptionSet& set,
                                         const CapPolicy& cap) {
  switch (cap.kind) {
    case CapPolicy::Kind::kNone:
      return std::nullopt;
    case CapPolicy::Kind::kIsoCarbon:
      if (within(option.footprint, set.baseline_cfp)) return std::nullopt;
      return "footprint " + std::to_string(option.footprint) + " kg exceeds iso-carbon budget " +
             std::to_string(set.baseline_cfp) + " kg";
    case CapPolicy::Kind::kIsoPower:
      if (within(option.power_w, set.baseline_power_w)) return std::nullopt;
      return "fleet power " + std::to_string(option.power_w) + " W exceeds baseline " +
             std::to_string(set.baseline_power_w) + " W";
    case CapPolicy::Kind::kAbsoluteCarbon:
      if (within(option.footprint, cap.budget_kg)) return std::nullopt;
      return "footprint " + std::to_string(option.footprint) + " kg exceeds budget " +
             std::to_string(cap.budget_kg) + " kg";
  }
  return std::nullopt;
}

ProcurementPlan select_plan(const OptionSet& set, const CapPolicy& cap) {
  const ProcurementOption* chosen = best_of(set, cap);
  if (chosen == nullptr) {
    std::vector<std::string> violations;
    for (const auto& option : set.options) {
      if (auto why = cap_violation(option, set, cap)) violations.push_back(describe(option) + ": " + *why);
    }
    throw NoFeasiblePlan("no procurement option satisfies the " + std::string(to_string(cap.kind)) + " cap",
                         std::move(violations));
  }
  ProcurementPlan plan = to_plan(*chosen);
  if (cap.kind != CapPolicy::Kind::kNone && best_of(set, CapPolicy::none()) != chosen) plan.binding_cap = cap.kind;
  return plan;
}

ProcurementPlan optimize(const DeploymentScenario& base, std::span<const Candidate> candidates,
                         const Context& context, double eta, const CapPolicy& cap) {
  return select_plan(evaluate_options(base, candidates, context, eta), cap);
}

std::string_view to_string(PivotResult::Status status) {
  switch (status) {
    case PivotResult::Status::kFound: return "found";
    case PivotResult::Status::kSamePlan: return "same_plan";
    case PivotResult::Status::kNoPositivePivot: return "no_positive_pivot";
    case PivotResult::Status::kNoCapPlan: return "no_cap_plan";
  }
  return "unknown";
}

PivotResult pivot_from_options(const OptionSet& set) {
  PivotResult out;
  const ProcurementOption* best = best_of(set, CapPolicy::none());
  if (best == nullptr) throw InvalidInput("no procurement options to compare");
  out.best = to_plan(*best);
  const ProcurementOption* cap_best = best_of(set, CapPolicy::iso_carbon());
  if (cap_best == nullptr) {
    out.status = PivotResult::Status::kNoCapPlan;
    return out;
  }
  out.cap_best = to_plan(*cap_best);
  if (cap_best == best || (cap_best->profit == best->profit && cap_best->footprint == best->footprint)) {
    out.status = PivotResult::Status::kSamePlan;
    return out;
  }
  // Price at which the cap-optimal option enters the upper envelope of
  // profit - price * footprint.
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  const ProcurementOption* displaced = nullptr;
  for (const auto& o : set.options) {
    if (&o == cap_best) continue;
    const double carbon_gap = o.footprint - cap_best->footprint;
    const double profit_gap = o.profit - cap_best->profit;
    if (carbon_gap > 0.0) {
      const double w = profit_gap / carbon_gap;
      if (w > lower) {
        lower = w;
        displaced = &o;
      }
    } else if (carbon_gap < 0.0) {
      upper = std::min(upper, profit_gap / carbon_gap);
    } else if (profit_gap > 0.0) {
      upper = -1.0;
    }
  }
  if (displaced == nullptr || !(lower < upper)) {
    out.status = PivotResult::Status::kNoPositivePivot;
    return out;
  }
  out.status = PivotResult::Status::kFound;
  out.usd_per_t = units::per_kg_to_per_tonne(lower);
  out.displaced = to_plan(*displaced);
  return out;
}

PivotResult pivot_incentive(const DeploymentScenario& base, std::span<const Candidate> candidates,
                            const Context& context, double eta) {
  if (candidates.size() < 2) throw InvalidInput("a pivot needs at least two candidates");
  Context unpriced = context;
  unpriced.carbon_price_op_usd_per_t = 0.0;
  unpriced.carbon_price_ca_usd_per_t = 0.0;
  return pivot_from_options(evaluate_options(base, candidates, unpriced, eta));
}

std::string_view to_string(GridCiResult::Status status) {
  switch (status) {
    case GridCiResult::Status::kSolved: return "solved";
    case GridCiResult::Status::kAlreadyAttainable: return "already_attainable";
    case GridCiResult::Status::kUnreachable: return "unreachable";
  }
  return "unknown";
}

GridCiResult required_grid_ci(const DeploymentScenario& scenario, const Context& context, double eta_target,
                              bool decommission) {
  if (!(eta_target >= 1.0)) throw InvalidInput("target growth must be at least 1");
  const auto costs = scenario_costs(scenario, context);
  const double goal = carbon_goal(costs, context);
  const auto current = max_sustainable_growth(costs, goal, decommission);
  if (!current.bounded || eta_target <= current.eta) {
    return {GridCiResult::Status::kAlreadyAttainable, context.carbon_intensity};
  }

  // Footprints are linear in the operating intensity x:
  //   upgrade  = x * grid / e + embodied,  legacy = x * grid.
  // Solve eta * upgrade(x) = goal - (1 - U) * (legacy(x) - upgrade(x)).
  const double grid = costs.grid_kwh;
  const double upgrade_kwh = grid / costs.gains.efficiency;
  const double embodied = costs.upgrade.capex_cfp;
  const double retain = decommission ? 0.0 : 1.0;
  const double numerator = goal - eta_target * embodied + retain * embodied;
  const double denominator = eta_target * upgrade_kwh + retain * (grid - upgrade_kwh);
  const double ci = numerator / denominator;
  if (ci < 0.0) return {GridCiResult::Status::kUnreachable, 0.0};
  return {GridCiResult::Status::kSolved, ci};
}

std::vector<LocationOutcome> sweep_locations(const DeploymentScenario& scenario, std::span<const Context> contexts,
                                             double eta_target) {
  if (contexts.empty()) throw InvalidInput("at least one context is required");
  std::vector<LocationOutcome> out;
  out.reserve(contexts.size());
  for (const auto& context : contexts) {
    LocationOutcome outcome;
    outcome.location = context.location;
    outcome.current_ci = context.carbon_intensity;
    outcome.dc_weight = context.dc_count;
    try {
      const auto report = assess(scenario, context);
      outcome.quadrant = report.quadrant;
      outcome.required_incentive = report.required_incentive;
      outcome.max_growth = scenario.decommission ? report.max_growth_upgrade : report.max_growth_extend;
      outcome.required_ci = required_grid_ci(scenario, context, eta_target, scenario.decommission);
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    out.push_back(std::move(outcome));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LocationOutcome& a, const LocationOutcome& b) { return a.location < b.location; });
  return out;
}

}  // namespace dcce
