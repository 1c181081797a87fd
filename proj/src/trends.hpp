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

// Exponential improvement rates from dated benchmark submissions.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dse.hpp"
#include "model.hpp"

namespace dcce {

struct BenchmarkRecord {
  std::string platform_id;
  std::string benchmark;
  Date date{};
  std::int64_t nodes = 1;
  double performance = 0.0;  // work per second for the whole submission
  std::optional<double> energy_kwh_per_work;
  std::optional<double> power_w;  // per device

  double per_node_performance() const { return performance / static_cast<double>(nodes); }
  // Work per kWh: measured when available, otherwise per-node rate over power.
  std::optional<double> efficiency() const;

  bool operator==(const BenchmarkRecord&) const = default;
};

// One record per (benchmark, platform), ordered by benchmark then platform.
// Ties resolve to the earliest date, then the lexicographically smallest id.
// Records without an efficiency are ignored in top-efficiency mode.
std::vector<BenchmarkRecord> select_frontier(std::span<const BenchmarkRecord> records, FrontierMode mode);

enum class TrendMetric { kPerformance, kEfficiency };

struct DoublingTime {
  bool improving = true;  // false: slope <= 0, no doubling time exists
  double months = 0.0;
  double std_months = 0.0;
  double slope_per_month = 0.0;  // log2 units
  std::size_t samples = 0;
};

// OLS of log2(value) on months; needs two distinct abscissae.
DoublingTime fit_doubling_time(std::span<const double> months, std::span<const double> values);
DoublingTime fit_doubling_time(std::span<const BenchmarkRecord> frontier, TrendMetric metric);

struct FrontierShift {
  double perf_shift_months = 0.0;
  double eff_shift_months = 0.0;
};

// Doubling time on the top-efficiency frontier minus the one on the
// top-performance frontier, for each metric.
FrontierShift frontier_shift(std::span<const BenchmarkRecord> records, const std::string& benchmark);

struct TrendFit {
  std::string benchmark;
  DoublingTime perf;
  DoublingTime eff;
  std::optional<FrontierShift> shift;
  std::string error;  // non-empty when the benchmark could not be fitted

  bool ok() const { return error.empty(); }
  DoublingRates rates() const;
};

std::vector<TrendFit> fit_trends(std::span<const BenchmarkRecord> records,
                                 const std::vector<std::string>& benchmark_filter = {});

// Mean yearly shortfall of efficiency improvement relative to performance,
// in percent. Benchmarks without two improving fits are skipped.
double efficiency_lag(std::span<const TrendFit> fits);

}  // namespace dcce
