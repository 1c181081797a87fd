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

// Dataset files: platforms.csv, benchmarks.csv, contexts.json, optional
// scenario.json / scenarios/*.json and design_targets.csv.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "procurement.hpp"
#include "trends.hpp"

namespace dcce {

enum class PerfUnit { kRate, kTime };

struct BenchmarkRow {
  std::string platform_id;
  std::string benchmark;
  Date date{};
  std::int64_t nodes = 1;
  double performance = 0.0;  // rate, or seconds per unit of work when unit is kTime
  PerfUnit unit = PerfUnit::kRate;
  std::optional<double> energy_kwh_per_work;
  std::optional<double> power_w;

  bool operator==(const BenchmarkRow&) const = default;
};

struct WorkloadWeight {
  std::string app;
  double weight = 1.0;
  std::optional<DesignPoint> synthetic;  // gains given directly instead of measured

  bool operator==(const WorkloadWeight&) const = default;
};

struct ScenarioFile {
  std::string id;
  std::string baseline_platform_id;
  std::int64_t count = 1;
  double utilization = 1.0;
  std::vector<std::string> candidate_ids;
  double lifetime_years = 4.0;
  double demand_growth = 1.0;
  bool decommission = true;
  std::optional<double> gross_income_usd;
  std::optional<double> reference_price_usd_per_hour;
  std::optional<std::string> reference_platform_id;
  Rounding rounding = Rounding::kContinuous;
  std::vector<WorkloadWeight> workload;

  bool operator==(const ScenarioFile&) const = default;
};

struct DesignTarget {
  std::string label;
  double demand_growth = 1.0;
  double acceleration = 1.0;
  double efficiency = 1.0;
  std::optional<double> design_incentive_usd_per_t;

  bool operator==(const DesignTarget&) const = default;
};

struct Dataset {
  std::vector<PlatformSpec> platforms;
  std::vector<BenchmarkRow> benchmarks;
  std::vector<Context> contexts;
  std::vector<ScenarioFile> scenarios;
  std::vector<DesignTarget> design_targets;

  const PlatformSpec& platform(const std::string& id) const;
  const Context& context(const std::string& location) const;
  const ScenarioFile& scenario(const std::string& id) const;

  // Rate-normalized records dated by platform release, with TDP standing in
  // for missing power readings.
  std::vector<BenchmarkRecord> trend_records() const;

  bool operator==(const Dataset&) const = default;
};

struct Diagnostic {
  std::string path;
  int row = 0;     // 1-based line, 0 when not applicable
  int column = 0;  // 1-based field, 0 when not applicable
  std::string message;

  std::string to_string() const;
};

struct Diagnostics {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const { return errors.empty(); }
};

class LoadError : public std::runtime_error {
 public:
  explicit LoadError(Diagnostics diagnostics);
  const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  Diagnostics diagnostics_;
};

struct LoadOptions {
  bool lax = false;  // unknown fields become warnings instead of errors
};

struct LoadResult {
  std::optional<Dataset> dataset;
  Diagnostics diagnostics;
};

LoadResult try_load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

// Writes every collection, scenarios as scenarios/<id>.json.
void save_dataset(const Dataset& dataset, const std::filesystem::path& root);

ScenarioFile parse_scenario_json(const std::string& text, const std::string& default_id = "scenario");
Context parse_context_json(const std::string& text);

WorkloadMix derive_workload_mix(const Dataset& dataset, const std::string& baseline_id, const std::string& candidate_id,
                                std::span<const WorkloadWeight> weights, double device_hours);

double estimate_gross_income(const Dataset& dataset, const ScenarioFile& scenario, double usd_per_hour);

DeploymentScenario resolve_scenario(const Dataset& dataset, const ScenarioFile& scenario,
                                    const std::string& candidate_id = {});
std::vector<Candidate> resolve_candidates(const Dataset& dataset, const ScenarioFile& scenario);

}  // namespace dcce
