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

// Acceleration / energy-efficiency design space: per-point costs, threshold
// curves, grid classification, trend projection and iso-EDP design solving.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "balance.hpp"
#include "model.hpp"

namespace dcce {

enum class CostDimension { kFinancial, kCarbon };

// Lifetime cost of replacing the baseline fleet with a device offering
// `point`, at demand growth `eta`. Device counts are continuous here.
double design_point_cost(const DesignPoint& point, const DeploymentScenario& scenario, const Context& context,
                         double eta, CostDimension dimension, const CarbonPrices& prices = {});

struct ThresholdCurve {
  enum class Kind { kSustainableUpgrade, kSustainableGrowth, kViableUpgrade, kIncentivized };

  Kind kind = Kind::kSustainableUpgrade;
  CostDimension dimension = CostDimension::kCarbon;
  double eta = 1.0;
  double incentive_usd_per_t = 0.0;  // kIncentivized only
  double budget = 0.0;               // right-hand side the points satisfy
  std::vector<DesignPoint> points;   // sorted by acceleration

  bool empty() const { return points.empty(); }
};

std::string_view to_string(ThresholdCurve::Kind kind);

struct CurveSampling {
  double a_min = 0.5;
  double a_max = 32.0;
  int points = 256;
};

// One sustainable-upgrade curve, one sustainable-growth curve per entry of
// `growth_targets`, one viable curve and one incentivized curve at
// `incentive_usd_per_t`. Accelerations whose required efficiency is
// unbounded are dropped.
std::vector<ThresholdCurve> threshold_curves(const DeploymentScenario& scenario, const Context& context,
                                             const std::vector<double>& growth_targets, double incentive_usd_per_t,
                                             const CurveSampling& sampling = {});

struct GridSpec {
  double a_min = 0.5;
  double a_max = 32.0;
  double e_min = 0.5;
  double e_max = 32.0;
  int a_resolution = 256;
  int e_resolution = 256;
};

struct GridCell {
  double cost_fin = 0.0;  // eta = 1
  double cost_cfp = 0.0;  // eta = 1
  bool viable = false;
  bool sustainable = false;
  bool scalable = false;  // footprint at eta within the carbon goal
  bool viable_incentivized = false;
};

struct DesignGrid {
  std::vector<double> accelerations;
  std::vector<double> efficiencies;
  double eta = 1.0;
  double incentive_usd_per_t = 0.0;
  std::vector<GridCell> cells;  // row-major, efficiency index outer

  const GridCell& at(std::size_t a_index, std::size_t e_index) const {
    return cells[e_index * accelerations.size() + a_index];
  }
};

DesignGrid evaluate_grid(const DeploymentScenario& scenario, const Context& context, const GridSpec& spec, double eta,
                         double incentive_usd_per_t = 0.0);

std::vector<double> log_space(double lo, double hi, int n);

// Months needed to double performance and efficiency, plus the signed change
// of each when the top-efficiency frontier is followed instead.
struct DoublingRates {
  double perf_months = 0.0;
  double eff_months = 0.0;
  double perf_shift_months = 0.0;
  double eff_shift_months = 0.0;
};

DesignPoint project_trend_point(const DoublingRates& rates, double years_ahead, FrontierMode mode);

struct IsoEdpSolution {
  std::vector<DesignPoint> roots;  // ascending efficiency
  std::optional<double> max_eta;   // highest eta_S on the line; nullopt when unbounded
  std::string diagnostic;
};

// Design points on the line a x e = k whose maximum sustainable growth equals
// `eta_target`.
IsoEdpSolution iso_edp_solve(double k, double eta_target, const DeploymentScenario& scenario, const Context& context,
                             bool decommission = true);

// Extra OPEX carbon price needed by `design` beyond what `trend` needs,
// floored at zero. Rows of a design table whose target growth the trend
// already reaches are reported as zero by the caller.
Incentive design_incentive(const DesignPoint& design, const DesignPoint& trend, const DeploymentScenario& scenario,
                           const Context& context);

}  // namespace dcce
