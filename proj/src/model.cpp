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

#include "model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

int parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InvalidInput("invalid date: '" + std::string(text) + "'");
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw InvalidInput("invalid date: '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const Date date{std::chrono::year{parse_int(text.substr(0, 4))},
                  std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2)))},
                  std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2)))}};
  if (!date.ok()) throw InvalidInput("invalid date: '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

double months_since_epoch(const Date& date) {
  const auto days = std::chrono::sys_days{date}.time_since_epoch().count();
  return static_cast<double>(days) / units::kDaysPerYear * units::kMonthsPerYear;
}

std::string_view to_string(EmbodiedPart part) {
  switch (part) {
    case EmbodiedPart::kIc: return "ic";
    case EmbodiedPart::kMem: return "mem";
    case EmbodiedPart::kMainboard: return "mainboard";
    case EmbodiedPart::kAssembly: return "assembly";
    case EmbodiedPart::kTransport: return "transport";
    case EmbodiedPart::kCooling: return "cooling";
    case EmbodiedPart::kServerBase: return "server_base";
  }
  return "unknown";
}

std::optional<EmbodiedPart> parse_embodied_part(std::string_view name) {
  for (auto part : kEmbodiedParts) {
    if (to_string(part) == name) return part;
  }
  return std::nullopt;
}

double EmbodiedComponents::amortized(EmbodiedPart part) const {
  switch (part) {
    case EmbodiedPart::kIc: return ic;
    case EmbodiedPart::kMem: return mem;
    case EmbodiedPart::kMainboard: return mainboard;
    case EmbodiedPart::kAssembly: return assembly;
    case EmbodiedPart::kTransport: return transport;
    case EmbodiedPart::kCooling: return cooling;
    case EmbodiedPart::kServerBase: return server_base / static_cast<double>(n_slots);
  }
  return 0.0;
}

void EmbodiedComponents::validate() const {
  require(n_slots >= 1, "n_slots must be at least 1");
  for (double v : {ic, mem, mainboard, assembly, transport, cooling, server_base}) {
    require(finite_nonneg(v), "embodied components must be non-negative");
  }
}

void PlatformSpec::validate() const {
  require(!id.empty(), "platform id must not be empty");
  require(finite_nonneg(unit_price), "unit_price must be non-negative");
  require(std::isfinite(tdp_w) && tdp_w > 0.0, "tdp must be positive");
  embodied.validate();
}

void WorkloadMix::validate() const {
  require(!entries.empty(), "workload must not be empty");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    require(seen.insert(e.app_id).second, "duplicate app id '" + e.app_id + "'");
    require(std::isfinite(e.rtu) && e.rtu > 0.0, "rtu must be positive for app '" + e.app_id + "'");
    require(std::isfinite(e.power_w) && e.power_w > 0.0, "power must be positive for app '" + e.app_id + "'");
    require(std::isfinite(e.acceleration) && e.acceleration > 0.0,
            "acceleration must be positive for app '" + e.app_id + "'");
    require(std::isfinite(e.efficiency) && e.efficiency > 0.0,
            "efficiency must be positive for app '" + e.app_id + "'");
  }
}

void Fleet::validate() const {
  platform.validate();
  require(count >= 1, "fleet count must be at least 1");
  require(utilization > 0.0 && utilization <= 1.0, "utilization must be in (0, 1]");
}

void DeploymentScenario::validate() const {
  baseline.validate();
  candidate.validate();
  workload.validate();
  require(std::isfinite(lifetime_years) && lifetime_years > 0.0, "lifetime_years must be positive");
  require(std::isfinite(demand_growth) && demand_growth >= 1.0, "demand_growth must be at least 1");
  require(finite_nonneg(gross_income), "gross_income must be non-negative");
}

void Context::validate() const {
  require(finite_nonneg(elec_price), "elec_price must be non-negative");
  require(finite_nonneg(carbon_intensity), "carbon_intensity must be non-negative");
  require(std::isfinite(pue) && pue >= 1.0, "pue must be at least 1");
  require(finite_nonneg(carbon_price_op_usd_per_t) && finite_nonneg(carbon_price_ca_usd_per_t), "carbon prices must be non-negative");
  require(finite_nonneg(dc_count), "dc_count must be non-negative");
  if (goal.kind == GoalPolicy::Kind::kAbsolute) {
    require(finite_nonneg(goal.budget_kg), "absolute carbon budget must be non-negative");
  }
}

std::string_view to_string(FrontierMode mode) {
  return mode == FrontierMode::kTopPerformance ? "top-performance" : "top-efficiency";
}

std::optional<FrontierMode> parse_frontier_mode(std::string_view text) {
  if (text == "top-performance") return FrontierMode::kTopPerformance;
  if (text == "top-efficiency") return FrontierMode::kTopEfficiency;
  return std::nullopt;
}

double embodied_unit_footprint(const EmbodiedComponents& components) {
  if (components.n_slots < 1) throw InvalidInput("n_slots must be at least 1");
  return components.ic + components.mem + components.mainboard + components.assembly + components.transport +
         components.cooling + components.server_base / static_cast<double>(components.n_slots);
}

std::vector<BreakdownEntry> embodied_breakdown(const EmbodiedComponents& components) {
  components.validate();
  const double total = embodied_unit_footprint(components);
  if (!(total > 0.0)) throw InvalidInput("empty breakdown: total embodied footprint is zero");

  std::vector<BreakdownEntry> out;
  out.reserve(kEmbodiedParts.size());
  for (auto part : kEmbodiedParts) {
    const double kg = components.amortized(part);
    out.push_back({part, kg, kg / total});
  }
  return out;
}

ModularSavings modular_replacement_savings(const EmbodiedComponents& components,
                                           std::span<const EmbodiedPart> retained) {
  components.validate();
  const double total = embodied_unit_footprint(components);
  std::set<EmbodiedPart> unique(retained.begin(), retained.end());
  ModularSavings out;
  for (auto part : unique) out.saved_kg += components.amortized(part);
  out.fraction = total > 0.0 ? out.saved_kg / total : 0.0;
  return out;
}

ModularSavings modular_replacement_savings(const EmbodiedComponents& components,
                                           std::span<const std::string> retained_names) {
  std::vector<EmbodiedPart> parts;
  for (const auto& name : retained_names) {
    auto part = parse_embodied_part(name);
    if (!part) throw InvalidInput("unknown embodied component '" + name + "'");
    parts.push_back(*part);
  }
  return modular_replacement_savings(components, parts);
}

DesignPoint equivalent_gains(const WorkloadMix& workload) {
  if (workload.entries.empty()) throw InvalidInput("workload must not be empty");
  double rtu_total = 0.0, rtu_over_a = 0.0;
  double energy_total = 0.0, energy_over_e = 0.0;
  for (const auto& k : workload.entries) {
    if (!(k.acceleration > 0.0) || !(k.efficiency > 0.0)) {
      throw InvalidInput("acceleration and efficiency must be positive for app '" + k.app_id + "'");
    }
    if (!(k.rtu > 0.0) || !(k.power_w > 0.0)) {
      throw InvalidInput("rtu and power must be positive for app '" + k.app_id + "'");
    }
    const double energy = k.rtu * k.power_w;
    rtu_total += k.rtu;
    rtu_over_a += k.rtu / k.acceleration;
    energy_total += energy;
    energy_over_e += energy / k.efficiency;
  }
  return {rtu_total / rtu_over_a, energy_total / energy_over_e};
}

FleetEnergy fleet_lifetime_energy(const Fleet& fleet, double lifetime_years, double pue) {
  if (!(lifetime_years > 0.0)) throw InvalidInput("lifetime_years must be positive");
  const double kw = fleet.platform.tdp_w / units::kWattsPerKilowatt;
  const double device_kwh =
      static_cast<double>(fleet.count) * kw * fleet.utilization * lifetime_years * units::kHoursPerYear;
  return {device_kwh, device_kwh * pue};
}

}  // namespace dcce
