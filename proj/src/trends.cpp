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

#include "trends.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

std::optional<double> BenchmarkRecord::efficiency() const {
  if (energy_kwh_per_work) return 1.0 / *energy_kwh_per_work;
  if (power_w && *power_w > 0.0) {
    return per_node_performance() * units::kSecondsPerHour * units::kWattsPerKilowatt / *power_w;
  }
  return std::nullopt;
}

std::vector<BenchmarkRecord> select_frontier(std::span<const BenchmarkRecord> records, FrontierMode mode) {
  auto score = [mode](const BenchmarkRecord& r) -> std::optional<double> {
    if (mode == FrontierMode::kTopPerformance) return r.per_node_performance();
    return r.efficiency();
  };
  auto better = [&](const BenchmarkRecord& a, double sa, const BenchmarkRecord& b, double sb) {
    if (sa != sb) return sa > sb;
    if (a.date != b.date) return a.date < b.date;
    return a.platform_id < b.platform_id;
  };

  std::map<std::pair<std::string, std::string>, std::pair<const BenchmarkRecord*, double>> best;
  for (const auto& r : records) {
    const auto s = score(r);
    if (!s) continue;
    auto key = std::make_pair(r.benchmark, r.platform_id);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), std::make_pair(&r, *s));
    } else if (better(r, *s, *it->second.first, it->second.second)) {
      it->second = {&r, *s};
    }
  }
  std::vector<BenchmarkRecord> out;
  out.reserve(best.size());
  for (const auto& [key, entry] : best) out.push_back(*entry.first);
  return out;
}

DoublingTime fit_doubling_time(std::span<const double> months, std::span<const double> values) {
  if (months.size() != values.size()) throw InvalidInput("months and values differ in length");
  const std::set<double> distinct(months.begin(), months.end());
  if (distinct.size() < 2) throw InsufficientData("need at least two distinct dates to fit a trend");

  const std::size_t n = months.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) throw InvalidInput("trend values must be positive");
    y[i] = std::log2(values[i]);
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += months[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (months[i] - mean_x) * (months[i] - mean_x);
    sxy += (months[i] - mean_x) * (y[i] - mean_y);
  }
  const double slope = sxy / sxx;

  DoublingTime out;
  out.samples = n;
  out.slope_per_month = slope;
  if (!(slope > 0.0)) {
    out.improving = false;
    return out;
  }
  double stderr_slope = 0.0;
  if (n > 2) {
    const double intercept = mean_y - slope * mean_x;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (intercept + slope * months[i]);
      ssr += r * r;
    }
    stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  out.months = 1.0 / slope;
  out.std_months = stderr_slope / (slope * slope);
  return out;
}

DoublingTime fit_doubling_time(std::span<const BenchmarkRecord> frontier, TrendMetric metric) {
  std::vector<double> months, values;
  for (const auto& r : frontier) {
    std::optional<double> v;
    if (metric == TrendMetric::kPerformance) {
      v = r.per_node_performance();
    } else {
      v = r.efficiency();
    }
    if (!v) continue;
    months.push_back(months_since_epoch(r.date));
    values.push_back(*v);
  }
  return fit_doubling_time(months, values);
}

namespace {

std::vector<BenchmarkRecord> of_benchmark(std::span<const BenchmarkRecord> records, const std::string& benchmark) {
  std::vector<BenchmarkRecord> out;
  for (const auto& r : records) {
    if (r.benchmark == benchmark) out.push_back(r);
  }
  return out;
}

double doubling_or_throw(const DoublingTime& fit, const std::string& what) {
  if (!fit.improving) throw InsufficientData("no improvement in " + what);
  return fit.months;
}

}  // namespace

FrontierShift frontier_shift(std::span<const BenchmarkRecord> records, const std::string& benchmark) {
  const auto subset = of_benchmark(records, benchmark);
  const auto top_perf = select_frontier(subset, FrontierMode::kTopPerformance);
  const auto top_eff = select_frontier(subset, FrontierMode::kTopEfficiency);
  FrontierShift out;
  out.perf_shift_months =
      doubling_or_throw(fit_doubling_time(top_eff, TrendMetric::kPerformance), "performance (top-efficiency)") -
      doubling_or_throw(fit_doubling_time(top_perf, TrendMetric::kPerformance), "performance (top-performance)");
  out.eff_shift_months =
      doubling_or_throw(fit_doubling_time(top_eff, TrendMetric::kEfficiency), "efficiency (top-efficiency)") -
      doubling_or_throw(fit_doubling_time(top_perf, TrendMetric::kEfficiency), "efficiency (top-performance)");
  return out;
}

DoublingRates TrendFit::rates() const {
  DoublingRates r{perf.months, eff.months, 0.0, 0.0};
  if (shift) {
    r.perf_shift_months = shift->perf_shift_months;
    r.eff_shift_months = shift->eff_shift_months;
  }
  return r;
}

std::vector<TrendFit> fit_trends(std::span<const BenchmarkRecord> records,
                                 const std::vector<std::string>& benchmark_filter) {
  std::set<std::string> names;
  for (const auto& r : records) names.insert(r.benchmark);
  if (!benchmark_filter.empty()) {
    std::set<std::string> wanted(benchmark_filter.begin(), benchmark_filter.end());
    std::erase_if(names, [&](const std::string& n) { return !wanted.contains(n); });
  }

  std::vector<TrendFit> fits;
  for (const auto& name : names) {
    TrendFit fit;
    fit.benchmark = name;
    try {
      const auto subset = of_benchmark(records, name);
      const auto top_perf = select_frontier(subset, FrontierMode::kTopPerformance);
      fit.perf = fit_doubling_time(top_perf, TrendMetric::kPerformance);
      fit.eff = fit_doubling_time(top_perf, TrendMetric::kEfficiency);
      try {
        fit.shift = frontier_shift(subset, name);
      } catch (const InsufficientData&) {
        fit.shift.reset();
      }
    } catch (const std::exception& e) {
      fit.error = e.what();
    }
    fits.push_back(std::move(fit));
  }
  return fits;
}

double efficiency_lag(std::span<const TrendFit> fits) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& f : fits) {
    if (!f.ok() || !f.perf.improving || !f.eff.improving) continue;
    const double ratio =
        std::exp2(units::kMonthsPerYear / f.eff.months) / std::exp2(units::kMonthsPerYear / f.perf.months);
    total += 1.0 - ratio;
    ++n;
  }
  return n == 0 ? 0.0 : 100.0 * total / static_cast<double>(n);
}

}  // namespace dcce
