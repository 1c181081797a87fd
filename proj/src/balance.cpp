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

#include "balance.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

namespace {

// Relative slack for comparisons that sit exactly on a break-even point.
constexpr double kBreakEvenTolerance = 1e-9;

}  // namespace

ScenarioCosts scenario_costs(const DeploymentScenario& scenario, const Context& context, const CarbonPrices& prices) {
  return scenario_costs(scenario, context, equivalent_gains(scenario.workload), prices);
}

ScenarioCosts scenario_costs(const DeploymentScenario& scenario, const Context& context, const DesignPoint& gains,
                             const CarbonPrices& prices) {
  if (!(gains.acceleration > 0.0) || !(gains.efficiency > 0.0)) {
    throw InvalidInput("acceleration and efficiency must be positive");
  }
  const FleetEnergy energy = fleet_lifetime_energy(scenario.baseline, scenario.lifetime_years, context.pue);
  const double elec_price = context.elec_price + prices.op * context.carbon_intensity;
  const double footprint = embodied_unit_footprint(scenario.candidate.embodied);
  const double unit_cost = scenario.candidate.unit_price + prices.ca * footprint;

  double devices = static_cast<double>(scenario.baseline.count) / gains.acceleration;
  if (scenario.rounding == Rounding::kCeil) devices = std::ceil(devices);

  ScenarioCosts out;
  out.gains = gains;
  out.grid_kwh = energy.grid_kwh;
  out.devices = devices;
  out.unit_footprint_kg = footprint;

  out.baseline.opex_fin = elec_price * energy.grid_kwh;
  out.baseline.opex_cfp = context.carbon_intensity * energy.grid_kwh;

  const double upgrade_kwh = energy.grid_kwh / gains.efficiency;
  out.upgrade.opex_fin = elec_price * upgrade_kwh;
  out.upgrade.opex_cfp = context.carbon_intensity * upgrade_kwh;
  out.upgrade.capex_fin = unit_cost * devices;
  out.upgrade.capex_cfp = footprint * devices;
  return out;
}

std::string_view to_string(QuadrantLabel label) {
  switch (label) {
    case QuadrantLabel::kNaturallyIncentivizedUpgrade: return "naturally incentivized sustainable upgrade";
    case QuadrantLabel::kNonIncentivizedSustainableUpgrade: return "non-incentivized sustainable upgrade";
    case QuadrantLabel::kIncentivizedNonSustainableUpgrade: return "incentivized non-sustainable upgrade";
    case QuadrantLabel::kNaturallyIncentivizedExtension: return "naturally incentivized lifetime extension";
  }
  return "unknown";
}

std::string_view slug(QuadrantLabel label) {
  switch (label) {
    case QuadrantLabel::kNaturallyIncentivizedUpgrade: return "naturally_incentivized_upgrade";
    case QuadrantLabel::kNonIncentivizedSustainableUpgrade: return "non_incentivized_sustainable_upgrade";
    case QuadrantLabel::kIncentivizedNonSustainableUpgrade: return "incentivized_non_sustainable_upgrade";
    case QuadrantLabel::kNaturallyIncentivizedExtension: return "naturally_incentivized_extension";
  }
  return "unknown";
}

Quadrant Quadrant::from_flags(bool viable, bool sustainable) {
  QuadrantLabel label;
  if (viable && sustainable) {
    label = QuadrantLabel::kNaturallyIncentivizedUpgrade;
  } else if (sustainable) {
    label = QuadrantLabel::kNonIncentivizedSustainableUpgrade;
  } else if (viable) {
    label = QuadrantLabel::kIncentivizedNonSustainableUpgrade;
  } else {
    label = QuadrantLabel::kNaturallyIncentivizedExtension;
  }
  return {viable, sustainable, label};
}

Quadrant classify(const ScenarioCosts& costs) {
  const bool viable = costs.upgrade.opex_fin + costs.upgrade.capex_fin <= costs.baseline.opex_fin;
  const bool sustainable = costs.upgrade.opex_cfp + costs.upgrade.capex_cfp <= costs.baseline.opex_cfp;
  return Quadrant::from_flags(viable, sustainable);
}

Quadrant classify_upgrade(const DeploymentScenario& scenario, const Context& context, const CarbonPrices& prices) {
  return classify(scenario_costs(scenario, context, prices));
}

double net_profit(const ScenarioCosts& costs, double gross_income, double eta, bool decommission) {
  if (!(eta >= 1.0)) throw InvalidInput("demand growth must be at least 1");
  const double upgrade_total = costs.upgrade.total_fin();
  if (decommission) return (gross_income - upgrade_total) * eta;
  // Retained fleet serves one unit of demand; new devices only the growth.
  return gross_income * eta - costs.baseline.opex_fin - upgrade_total * (eta - 1.0);
}

double net_profit(const DeploymentScenario& scenario, const Context& context, double eta, bool decommission) {
  return net_profit(scenario_costs(scenario, context), scenario.gross_income, eta, decommission);
}

double carbon_footprint(const ScenarioCosts& costs, double eta, bool decommission) {
  if (!(eta >= 1.0)) throw InvalidInput("demand growth must be at least 1");
  const double upgrade_total = costs.upgrade.total_cfp();
  if (decommission) return upgrade_total * eta;
  return costs.baseline.opex_cfp + upgrade_total * (eta - 1.0);
}

double carbon_footprint(const DeploymentScenario& scenario, const Context& context, double eta, bool decommission) {
  return carbon_footprint(scenario_costs(scenario, context), eta, decommission);
}

IncentivizedPrices incentivized_prices(const Context& context, const PlatformSpec& platform) {
  const auto prices = CarbonPrices::from_context(context);
  return {context.elec_price + prices.op * context.carbon_intensity,
          platform.unit_price + prices.ca * embodied_unit_footprint(platform.embodied)};
}

std::string_view marker(Incentive::Kind kind) {
  switch (kind) {
    case Incentive::Kind::kZero: return "zero";
    case Incentive::Kind::kValue: return "value";
    case Incentive::Kind::kNotSustainable: return "NS";
    case Incentive::Kind::kNotFeasible: return "NF";
  }
  return "unknown";
}

Incentive required_upgrade_incentive(const ScenarioCosts& costs) {
  const double shortfall = costs.upgrade.capex_fin + costs.upgrade.opex_fin - costs.baseline.opex_fin;
  if (shortfall <= 0.0) return Incentive::zero();
  const double carbon_saved = costs.baseline.opex_cfp - costs.upgrade.opex_cfp;
  if (!(carbon_saved > 0.0)) return Incentive::not_sustainable();
  return Incentive::value(units::per_kg_to_per_tonne(shortfall / carbon_saved));
}

Incentive required_upgrade_incentive(const DeploymentScenario& scenario, const Context& context) {
  return required_upgrade_incentive(scenario_costs(scenario, context));
}

bool incentive_feasible(const DeploymentScenario& scenario, const Context& context, double usd_per_t) {
  if (!(usd_per_t >= 0.0)) throw InvalidInput("incentive must be non-negative");
  const auto costs = scenario_costs(scenario, context, CarbonPrices{units::per_tonne_to_per_kg(usd_per_t), 0.0});
  const double scale = std::max({scenario.gross_income, costs.upgrade.total_fin(), 1.0});
  const double slack = -kBreakEvenTolerance * scale;
  for (double eta : {1.0, scenario.demand_growth}) {
    if (net_profit(costs, scenario.gross_income, eta, scenario.decommission) < slack) return false;
  }
  return true;
}

double carbon_goal(const ScenarioCosts& costs, const Context& context) {
  if (context.goal.kind == GoalPolicy::Kind::kAbsolute) return context.goal.budget_kg;
  return costs.baseline.opex_cfp;
}

double carbon_goal(const DeploymentScenario& scenario, const Context& context) {
  return carbon_goal(scenario_costs(scenario, context), context);
}

GrowthLimit max_sustainable_growth(const ScenarioCosts& costs, double goal_kg, bool decommission) {
  const double upgrade_total = costs.upgrade.total_cfp();
  if (!(upgrade_total > 0.0)) return GrowthLimit::unbounded();
  // Written so that retention under an iso-carbon goal yields exactly 1.
  if (decommission) return {true, goal_kg / upgrade_total};
  return {true, 1.0 + (goal_kg - costs.baseline.opex_cfp) / upgrade_total};
}

GrowthLimit max_sustainable_growth(const DeploymentScenario& scenario, const Context& context, bool decommission) {
  const auto costs = scenario_costs(scenario, context);
  return max_sustainable_growth(costs, carbon_goal(costs, context), decommission);
}

AssessmentReport assess(const DeploymentScenario& scenario, const Context& context) {
  scenario.validate();
  context.validate();

  AssessmentReport report;
  report.costs = scenario_costs(scenario, context);
  report.quadrant = classify(report.costs);
  report.carbon_goal_kg = carbon_goal(report.costs, context);
  report.max_growth_upgrade = max_sustainable_growth(report.costs, report.carbon_goal_kg, true);
  report.max_growth_extend = max_sustainable_growth(report.costs, report.carbon_goal_kg, false);
  report.demand_growth = scenario.demand_growth;
  report.decommission = scenario.decommission;
  report.profit_at_growth = net_profit(report.costs, scenario.gross_income, scenario.demand_growth, scenario.decommission);
  report.cfp_at_growth = carbon_footprint(report.costs, scenario.demand_growth, scenario.decommission);

  if (!report.quadrant.sustainable) {
    report.required_incentive = Incentive::not_sustainable();
  } else if (report.quadrant.viable) {
    report.required_incentive = Incentive::zero();
  } else {
    report.required_incentive = required_upgrade_incentive(report.costs);
    if (report.required_incentive.kind == Incentive::Kind::kValue &&
        !incentive_feasible(scenario, context, report.required_incentive.usd_per_t)) {
      report.required_incentive = Incentive::not_feasible(report.required_incentive.usd_per_t);
    }
  }
  return report;
}

}  // namespace dcce
