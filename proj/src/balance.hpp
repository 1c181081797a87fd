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

#pragma once

// Upgrade-versus-extension algebra: OPEX/CAPEX balance in money and
// emissions, decision quadrants, growth-dependent profit and footprint,
// carbon-price adjusted costs, the break-even upgrade incentive and the
// maximum sustainable demand growth.

#include <string_view>

#include "model.hpp"
#include "units.hpp"

namespace dcce {

struct CostBreakdown {
  double opex_fin = 0.0;   // USD
  double capex_fin = 0.0;  // USD
  double opex_cfp = 0.0;   // kgCO2e
  double capex_cfp = 0.0;  // kgCO2e

  double total_fin() const { return opex_fin + capex_fin; }
  double total_cfp() const { return opex_cfp + capex_cfp; }
};

// Carbon prices folded into financial costs, per kg. `op` raises the
// electricity price by op x CI, `ca` raises the device price by ca x unit
// embodied footprint.
// Per-kg carbon prices used inside the engine.
struct CarbonPrices {
  double op = 0.0;
  double ca = 0.0;

  static CarbonPrices uniform(double per_kg) { return {per_kg, per_kg}; }
  static CarbonPrices from_context(const Context& context) {
    return {units::per_tonne_to_per_kg(context.carbon_price_op_usd_per_t),
            units::per_tonne_to_per_kg(context.carbon_price_ca_usd_per_t)};
  }
};

// Both options evaluated at baseline demand (eta = 1).
struct ScenarioCosts {
  CostBreakdown baseline;
  CostBreakdown upgrade;
  DesignPoint gains;
  double grid_kwh = 0.0;          // baseline fleet, PUE included
  double devices = 0.0;           // new devices bought at eta = 1
  double unit_footprint_kg = 0.0;
};

ScenarioCosts scenario_costs(const DeploymentScenario& scenario, const Context& context,
                             const CarbonPrices& prices = {});
// Same, with the workload-equivalent gains replaced by `gains`.
ScenarioCosts scenario_costs(const DeploymentScenario& scenario, const Context& context, const DesignPoint& gains,
                             const CarbonPrices& prices = {});

enum class QuadrantLabel {
  kNaturallyIncentivizedUpgrade,       // V=1 S=1
  kNonIncentivizedSustainableUpgrade,  // V=0 S=1
  kIncentivizedNonSustainableUpgrade,  // V=1 S=0
  kNaturallyIncentivizedExtension,     // V=0 S=0
};

std::string_view to_string(QuadrantLabel label);
std::string_view slug(QuadrantLabel label);

struct Quadrant {
  bool viable = false;
  bool sustainable = false;
  QuadrantLabel label = QuadrantLabel::kNaturallyIncentivizedExtension;

  static Quadrant from_flags(bool viable, bool sustainable);
  bool operator==(const Quadrant&) const = default;
};

// Ties count as satisfying the upgrade condition.
Quadrant classify(const ScenarioCosts& costs);
Quadrant classify_upgrade(const DeploymentScenario& scenario, const Context& context,
                          const CarbonPrices& prices = {});

// Net profit in USD at demand growth `eta`. With decommission == false the
// legacy fleet keeps serving one demand unit.
double net_profit(const ScenarioCosts& costs, double gross_income, double eta, bool decommission);
double net_profit(const DeploymentScenario& scenario, const Context& context, double eta, bool decommission);

// Lifetime footprint in kgCO2e at demand growth `eta`.
double carbon_footprint(const ScenarioCosts& costs, double eta, bool decommission);
double carbon_footprint(const DeploymentScenario& scenario, const Context& context, double eta, bool decommission);

struct IncentivizedPrices {
  double elec_price = 0.0;  // USD/kWh
  double unit_cost = 0.0;   // USD per device
};

IncentivizedPrices incentivized_prices(const Context& context, const PlatformSpec& platform);

// Carbon-price requirement, tagged. Markers never carry a sentinel value.
struct Incentive {
  enum class Kind { kZero, kValue, kNotSustainable, kNotFeasible };

  Kind kind = Kind::kZero;
  double usd_per_t = 0.0;         // meaningful for kZero and kValue
  double break_even_usd_per_t = 0.0;  // the value that was ruled infeasible, for kNotFeasible

  static Incentive zero() { return {}; }
  static Incentive value(double usd_per_t) { return {Kind::kValue, usd_per_t, 0.0}; }
  static Incentive not_sustainable() { return {Kind::kNotSustainable, 0.0, 0.0}; }
  static Incentive not_feasible(double break_even) { return {Kind::kNotFeasible, 0.0, break_even}; }

  bool has_value() const { return kind == Kind::kZero || kind == Kind::kValue; }
};

std::string_view marker(Incentive::Kind kind);

// Smallest OPEX carbon price making the upgrade financially break even.
Incentive required_upgrade_incentive(const ScenarioCosts& costs);
Incentive required_upgrade_incentive(const DeploymentScenario& scenario, const Context& context);

// Whether operating the upgraded fleet stays profitable once an OPEX carbon
// price of `usd_per_t` is charged on all electricity. Checked at eta = 1 and at
// the scenario's demand growth; both must hold.
bool incentive_feasible(const DeploymentScenario& scenario, const Context& context, double usd_per_t);

double carbon_goal(const ScenarioCosts& costs, const Context& context);
double carbon_goal(const DeploymentScenario& scenario, const Context& context);

struct GrowthLimit {
  bool bounded = true;
  double eta = 0.0;  // below 1 means the goal cannot be met even at baseline demand

  static GrowthLimit unbounded() { return {false, 0.0}; }
};

GrowthLimit max_sustainable_growth(const ScenarioCosts& costs, double goal_kg, bool decommission);
GrowthLimit max_sustainable_growth(const DeploymentScenario& scenario, const Context& context, bool decommission);

struct AssessmentReport {
  ScenarioCosts costs;
  Quadrant quadrant;
  Incentive required_incentive;
  double carbon_goal_kg = 0.0;
  GrowthLimit max_growth_upgrade;  // decommission legacy
  GrowthLimit max_growth_extend;   // retain legacy
  double demand_growth = 1.0;
  bool decommission = true;
  double profit_at_growth = 0.0;
  double cfp_at_growth = 0.0;
};

AssessmentReport assess(const DeploymentScenario& scenario, const Context& context);

}  // namespace dcce
