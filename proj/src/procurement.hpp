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

// Single-platform procurement under emission caps and carbon prices, the
// pivot carbon price between the profit-optimal and the cap-optimal choice,
// location sweeps and the grid decarbonization needed for a growth target.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balance.hpp"
#include "model.hpp"

namespace dcce {

struct Candidate {
  PlatformSpec platform;
  WorkloadMix workload;  // gains relative to the baseline fleet
};

struct CapPolicy {
  enum class Kind { kNone, kIsoCarbon, kIsoPower, kAbsoluteCarbon };

  Kind kind = Kind::kNone;
  double budget_kg = 0.0;  // kAbsoluteCarbon only

  static CapPolicy none() { return {}; }
  static CapPolicy iso_carbon() { return {Kind::kIsoCarbon, 0.0}; }
  static CapPolicy iso_power() { return {Kind::kIsoPower, 0.0}; }
  static CapPolicy absolute(double kg) { return {Kind::kAbsoluteCarbon, kg}; }
};

std::string_view to_string(CapPolicy::Kind kind);
// Accepts none | iso-carbon | iso-power | abs:<kg>.
CapPolicy parse_cap(std::string_view text);

struct ProcurementOption {
  std::string platform_id;
  bool decommission = true;
  double device_count = 0.0;  // new devices; zero for a pure lifetime extension
  double profit = 0.0;        // USD at the requested growth, context carbon prices applied
  double footprint = 0.0;     // kgCO2e at the requested growth
  double power_w = 0.0;       // TDP x devices x utilization of the resulting fleet
  GrowthLimit max_growth;
  ScenarioCosts costs;
};

struct OptionSet {
  double eta = 1.0;
  double baseline_cfp = 0.0;     // iso-carbon budget
  double baseline_power_w = 0.0; // iso-power budget
  std::vector<ProcurementOption> options;
};

// Every (candidate, decommission) pair. Carbon prices from the context are
// charged on both electricity and embodied emissions.
OptionSet evaluate_options(const DeploymentScenario& base, std::span<const Candidate> candidates,
                           const Context& context, double eta);

// Empty when the option satisfies the cap, otherwise the reason it does not.
std::optional<std::string> cap_violation(const ProcurementOption& option, const OptionSet& set, const CapPolicy& cap);

struct ProcurementPlan {
  std::string chosen_platform;
  bool decommission = true;
  double device_count = 0.0;
  double profit = 0.0;
  double footprint = 0.0;
  GrowthLimit max_growth;
  std::optional<CapPolicy::Kind> binding_cap;
};

// Highest profit among options meeting the cap; ties go to the lower
// footprint, then the smaller platform id, then retention of the legacy fleet.
// Throws NoFeasiblePlan.
ProcurementPlan select_plan(const OptionSet& set, const CapPolicy& cap);
ProcurementPlan optimize(const DeploymentScenario& base, std::span<const Candidate> candidates,
                         const Context& context, double eta, const CapPolicy& cap);

struct PivotResult {
  enum class Status { kFound, kSamePlan, kNoPositivePivot, kNoCapPlan };

  Status status = Status::kSamePlan;
  double usd_per_t = 0.0;  // kFound only
  std::optional<ProcurementPlan> best;
  std::optional<ProcurementPlan> cap_best;
  std::optional<ProcurementPlan> displaced;  // winner just below the pivot; kFound only
};

std::string_view to_string(PivotResult::Status status);

// Carbon price at which the profit-optimal plan and the iso-carbon optimal
// plan earn the same, with the price charged on all emissions. Evaluated
// without the context's own carbon prices.
PivotResult pivot_from_options(const OptionSet& set);
PivotResult pivot_incentive(const DeploymentScenario& base, std::span<const Candidate> candidates,
                            const Context& context, double eta);

struct GridCiResult {
  enum class Status { kSolved, kAlreadyAttainable, kUnreachable };

  Status status = Status::kSolved;
  double ci = 0.0;  // kgCO2e/kWh
};

std::string_view to_string(GridCiResult::Status status);

// Grid carbon intensity at which the scenario reaches `eta_target`, with the
// carbon goal frozen at its value under the context's current intensity.
GridCiResult required_grid_ci(const DeploymentScenario& scenario, const Context& context, double eta_target,
                              bool decommission);

struct LocationOutcome {
  std::string location;
  Quadrant quadrant;
  Incentive required_incentive;
  GrowthLimit max_growth;
  GridCiResult required_ci;
  double current_ci = 0.0;
  double dc_weight = 0.0;
  std::string error;  // non-empty if this location could not be evaluated
};

// Sorted by location; a failing context yields an outcome with `error` set.
std::vector<LocationOutcome> sweep_locations(const DeploymentScenario& scenario, std::span<const Context> contexts,
                                             double eta_target);

}  // namespace dcce
