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

#include "dse.hpp"

#include <cmath>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

namespace {

struct LinearCost {
  double energy_rate = 0.0;  // USD or kg per grid kWh
  double unit_cost = 0.0;    // USD or kg per device
};

LinearCost cost_terms(const DeploymentScenario& scenario, const Context& context, CostDimension dimension,
                      const CarbonPrices& prices) {
  const double footprint = embodied_unit_footprint(scenario.candidate.embodied);
  if (dimension == CostDimension::kCarbon) return {context.carbon_intensity, footprint};
  return {context.elec_price + prices.op * context.carbon_intensity,
          scenario.candidate.unit_price + prices.ca * footprint};
}

double baseline_grid_kwh(const DeploymentScenario& scenario, const Context& context) {
  return fleet_lifetime_energy(scenario.baseline, scenario.lifetime_years, context.pue).grid_kwh;
}

ThresholdCurve trace(ThresholdCurve curve, const LinearCost& terms, double grid_kwh, double devices,
                     const CurveSampling& sampling) {
  const double energy_cost = terms.energy_rate * grid_kwh;
  if (!(energy_cost > 0.0)) return curve;
  for (double a : log_space(sampling.a_min, sampling.a_max, sampling.points)) {
    const double headroom = curve.budget / curve.eta - terms.unit_cost * devices / a;
    if (headroom <= 0.0) continue;
    curve.points.push_back({a, energy_cost / headroom});
  }
  return curve;
}

}  // namespace

double design_point_cost(const DesignPoint& point, const DeploymentScenario& scenario, const Context& context,
                         double eta, CostDimension dimension, const CarbonPrices& prices) {
  if (!(eta >= 1.0)) throw InvalidInput("demand growth must be at least 1");
  if (!(point.acceleration > 0.0) || !(point.efficiency > 0.0)) {
    throw InvalidInput("design point gains must be positive");
  }
  const auto terms = cost_terms(scenario, context, dimension, prices);
  const double grid_kwh = baseline_grid_kwh(scenario, context);
  const double devices = static_cast<double>(scenario.baseline.count) / point.acceleration;
  return (terms.energy_rate * grid_kwh / point.efficiency + terms.unit_cost * devices) * eta;
}

std::string_view to_string(ThresholdCurve::Kind kind) {
  switch (kind) {
    case ThresholdCurve::Kind::kSustainableUpgrade: return "sustainable-upgrade";
    case ThresholdCurve::Kind::kSustainableGrowth: return "sustainable-growth";
    case ThresholdCurve::Kind::kViableUpgrade: return "viable-upgrade";
    case ThresholdCurve::Kind::kIncentivized: return "incentivized";
  }
  return "unknown";
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InvalidInput("log range needs 0 < lo <= hi and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<ThresholdCurve> threshold_curves(const DeploymentScenario& scenario, const Context& context,
                                             const std::vector<double>& growth_targets, double incentive_usd_per_t,
                                             const CurveSampling& sampling) {
  if (!(incentive_usd_per_t >= 0.0)) throw InvalidInput("incentive must be non-negative");
  for (double eta : growth_targets) {
    if (!(eta >= 1.0)) throw InvalidInput("growth targets must be at least 1");
  }
  const CarbonPrices incentive{units::per_tonne_to_per_kg(incentive_usd_per_t), 0.0};
  const auto costs = scenario_costs(scenario, context);
  const auto incentivized_costs = scenario_costs(scenario, context, incentive);
  const double grid_kwh = costs.grid_kwh;
  const double devices = static_cast<double>(scenario.baseline.count);
  const auto carbon = cost_terms(scenario, context, CostDimension::kCarbon, {});
  const auto money = cost_terms(scenario, context, CostDimension::kFinancial, {});
  const auto money_incentivized = cost_terms(scenario, context, CostDimension::kFinancial, incentive);

  std::vector<ThresholdCurve> curves;
  curves.push_back(trace({ThresholdCurve::Kind::kSustainableUpgrade, CostDimension::kCarbon, 1.0, 0.0,
                          costs.baseline.opex_cfp, {}},
                         carbon, grid_kwh, devices, sampling));
  const double goal = carbon_goal(costs, context);
  for (double eta : growth_targets) {
    curves.push_back(trace({ThresholdCurve::Kind::kSustainableGrowth, CostDimension::kCarbon, eta, 0.0, goal, {}},
                           carbon, grid_kwh, devices, sampling));
  }
  curves.push_back(trace({ThresholdCurve::Kind::kViableUpgrade, CostDimension::kFinancial, 1.0, 0.0,
                          costs.baseline.opex_fin, {}},
                         money, grid_kwh, devices, sampling));
  curves.push_back(trace({ThresholdCurve::Kind::kIncentivized, CostDimension::kFinancial, 1.0, incentive_usd_per_t,
                          incentivized_costs.baseline.opex_fin, {}},
                         money_incentivized, grid_kwh, devices, sampling));
  return curves;
}

DesignGrid evaluate_grid(const DeploymentScenario& scenario, const Context& context, const GridSpec& spec, double eta,
                         double incentive_usd_per_t) {
  if (!(eta >= 1.0)) throw InvalidInput("demand growth must be at least 1");
  if (!(incentive_usd_per_t >= 0.0)) throw InvalidInput("incentive must be non-negative");
  if (spec.a_resolution < 1 || spec.e_resolution < 1) throw InvalidInput("grid resolution must be positive");

  const CarbonPrices incentive{units::per_tonne_to_per_kg(incentive_usd_per_t), 0.0};
  const auto costs = scenario_costs(scenario, context);
  const auto incentivized_costs = scenario_costs(scenario, context, incentive);
  const double goal = carbon_goal(costs, context);

  DesignGrid grid;
  grid.accelerations = log_space(spec.a_min, spec.a_max, spec.a_resolution);
  grid.efficiencies = log_space(spec.e_min, spec.e_max, spec.e_resolution);
  grid.eta = eta;
  grid.incentive_usd_per_t = incentive_usd_per_t;
  grid.cells.reserve(grid.accelerations.size() * grid.efficiencies.size());
  for (double e : grid.efficiencies) {
    for (double a : grid.accelerations) {
      const DesignPoint point{a, e};
      GridCell cell;
      cell.cost_fin = design_point_cost(point, scenario, context, 1.0, CostDimension::kFinancial);
      cell.cost_cfp = design_point_cost(point, scenario, context, 1.0, CostDimension::kCarbon);
      cell.viable = cell.cost_fin <= costs.baseline.opex_fin;
      cell.sustainable = cell.cost_cfp <= costs.baseline.opex_cfp;
      cell.scalable = cell.cost_cfp * eta <= goal;
      cell.viable_incentivized = design_point_cost(point, scenario, context, 1.0, CostDimension::kFinancial,
                                                   incentive) <= incentivized_costs.baseline.opex_fin;
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

DesignPoint project_trend_point(const DoublingRates& rates, double years_ahead, FrontierMode mode) {
  double perf = rates.perf_months;
  double eff = rates.eff_months;
  if (mode == FrontierMode::kTopEfficiency) {
    perf += rates.perf_shift_months;
    eff += rates.eff_shift_months;
  }
  if (!(perf > 0.0) || !(eff > 0.0)) throw InvalidInput("doubling times must be positive");
  const double months = units::kMonthsPerYear * years_ahead;
  return {std::exp2(months / perf), std::exp2(months / eff)};
}

IsoEdpSolution iso_edp_solve(double k, double eta_target, const DeploymentScenario& scenario, const Context& context,
                             bool decommission) {
  if (!(k > 0.0)) throw InvalidInput("iso-EDP constant must be positive");
  if (!(eta_target >= 1.0)) throw InvalidInput("target growth must be at least 1");

  const auto costs = scenario_costs(scenario, context);
  const double goal = carbon_goal(costs, context);
  const double baseline_cfp = costs.baseline.opex_cfp;
  // Upgrade footprint on the line: quadratic / e + linear * e.
  const double energy_term = context.carbon_intensity * costs.grid_kwh;
  const double embodied_term = costs.unit_footprint_kg * static_cast<double>(scenario.baseline.count) / k;

  IsoEdpSolution out;
  const bool bounded = energy_term > 0.0 && embodied_term > 0.0;
  if (bounded) {
    const double min_footprint = 2.0 * std::sqrt(energy_term * embodied_term);
    out.max_eta = decommission ? goal / min_footprint : 1.0 + (goal - baseline_cfp) / min_footprint;
  }

  double target_footprint;
  if (decommission) {
    target_footprint = goal / eta_target;
  } else {
    if (eta_target == 1.0) {
      out.diagnostic = "retaining legacy at eta = 1 leaves growth independent of the design point";
      return out;
    }
    target_footprint = (goal - baseline_cfp) / (eta_target - 1.0);
  }
  if (!(target_footprint > 0.0)) {
    out.diagnostic = "carbon goal leaves no headroom for the target growth";
    return out;
  }

  std::vector<double> efficiencies;
  if (bounded) {
    const double disc = target_footprint * target_footprint - 4.0 * embodied_term * energy_term;
    if (disc < 0.0) {
      out.diagnostic = "target growth exceeds the maximum attainable on this iso-EDP line (" +
                       std::to_string(*out.max_eta) + ")";
      return out;
    }
    const double q = 0.5 * (target_footprint + std::sqrt(disc));
    efficiencies.push_back(energy_term / q);
    if (disc > 0.0) efficiencies.push_back(q / embodied_term);
  } else if (energy_term > 0.0) {
    efficiencies.push_back(energy_term / target_footprint);
  } else if (embodied_term > 0.0) {
    efficiencies.push_back(target_footprint / embodied_term);
  } else {
    out.diagnostic = "upgrade footprint is zero along the whole line";
    return out;
  }
  for (double e : efficiencies) out.roots.push_back({k / e, e});
  return out;
}

Incentive design_incentive(const DesignPoint& design, const DesignPoint& trend, const DeploymentScenario& scenario,
                           const Context& context) {
  const auto design_costs = scenario_costs(scenario, context, design);
  const auto trend_costs = scenario_costs(scenario, context, trend);
  const auto at_design = required_upgrade_incentive(design_costs);
  const auto at_trend = required_upgrade_incentive(trend_costs);
  if (!at_design.has_value() || !at_trend.has_value()) return Incentive::not_sustainable();

  const double extra = at_design.usd_per_t - at_trend.usd_per_t;
  return extra > 0.0 ? Incentive::value(extra) : Incentive::zero();
}

}  // namespace dcce
