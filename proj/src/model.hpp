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

// Domain types shared by every engine module, plus the embodied-emissions,
// equivalent-gain and fleet-energy primitives.

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcce {

using Date = std::chrono::year_month_day;

// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws InvalidInput.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);
// Months elapsed since 1970-01-01 under the 365-day calendar model.
double months_since_epoch(const Date& date);

enum class EmbodiedPart { kIc, kMem, kMainboard, kAssembly, kTransport, kCooling, kServerBase };

inline constexpr std::array<EmbodiedPart, 7> kEmbodiedParts = {
    EmbodiedPart::kIc,        EmbodiedPart::kMem,     EmbodiedPart::kMainboard,  EmbodiedPart::kAssembly,
    EmbodiedPart::kTransport, EmbodiedPart::kCooling, EmbodiedPart::kServerBase,
};

std::string_view to_string(EmbodiedPart part);
std::optional<EmbodiedPart> parse_embodied_part(std::string_view name);

// Per-device embodied emissions in kgCO2e. `server_base` is the shared
// chassis/host share of one server and is amortized over `n_slots` devices.
struct EmbodiedComponents {
  double ic = 0.0;
  double mem = 0.0;
  double mainboard = 0.0;
  double assembly = 0.0;
  double transport = 0.0;
  double cooling = 0.0;
  double server_base = 0.0;
  std::int64_t n_slots = 1;

  // Value of one part as it enters the unit footprint (base already amortized).
  double amortized(EmbodiedPart part) const;
  void validate() const;

  bool operator==(const EmbodiedComponents&) const = default;
};

struct PlatformSpec {
  std::string id;
  std::string vendor;
  Date release_date{};
  double unit_price = 0.0;  // USD per device
  double tdp_w = 0.0;       // proxy power per device
  EmbodiedComponents embodied;

  void validate() const;

  bool operator==(const PlatformSpec&) const = default;
};

struct WorkloadEntry {
  std::string app_id;
  double rtu = 0.0;      // device-hours over the lifetime
  double power_w = 0.0;  // baseline power while running the app
  double acceleration = 1.0;
  double efficiency = 1.0;

  bool operator==(const WorkloadEntry&) const = default;
};

struct WorkloadMix {
  std::vector<WorkloadEntry> entries;

  void validate() const;

  bool operator==(const WorkloadMix&) const = default;
};

struct Fleet {
  PlatformSpec platform;
  std::int64_t count = 1;
  double utilization = 1.0;

  void validate() const;

  bool operator==(const Fleet&) const = default;
};

// Device-count rounding for N_b / a. Continuous follows the analytic model,
// ceil buys whole devices.
enum class Rounding { kContinuous, kCeil };

struct DeploymentScenario {
  std::string id;
  Fleet baseline;
  PlatformSpec candidate;
  WorkloadMix workload;
  double lifetime_years = 4.0;
  double gross_income = 0.0;  // USD over the lifetime at baseline demand
  double demand_growth = 1.0;
  bool decommission = true;
  Rounding rounding = Rounding::kContinuous;

  void validate() const;

  bool operator==(const DeploymentScenario&) const = default;
};

struct GoalPolicy {
  enum class Kind { kIsoCarbon, kAbsolute };

  Kind kind = Kind::kIsoCarbon;
  double budget_kg = 0.0;  // used when kind == kAbsolute

  static GoalPolicy iso_carbon() { return {}; }
  static GoalPolicy absolute(double kg) { return {Kind::kAbsolute, kg}; }

  bool operator==(const GoalPolicy&) const = default;
};

// Location economics. Carbon prices are stored per kg.
struct Context {
  std::string location;
  double elec_price = 0.0;        // USD/kWh
  double carbon_intensity = 0.0;  // kgCO2e/kWh
  double pue = 1.0;
  double carbon_price_op_usd_per_t = 0.0;  // on electricity emissions
  double carbon_price_ca_usd_per_t = 0.0;  // on embodied emissions
  GoalPolicy goal;
  double dc_count = 0.0;

  void validate() const;

  bool operator==(const Context&) const = default;
};

// A point in the acceleration / energy-efficiency plane.
struct DesignPoint {
  double acceleration = 1.0;
  double efficiency = 1.0;

  bool operator==(const DesignPoint&) const = default;
};

// Which submission represents a platform on a benchmark: the fastest, or
// the most energy-efficient.
enum class FrontierMode { kTopPerformance, kTopEfficiency };

std::string_view to_string(FrontierMode mode);
std::optional<FrontierMode> parse_frontier_mode(std::string_view text);

double embodied_unit_footprint(const EmbodiedComponents& components);

struct BreakdownEntry {
  EmbodiedPart part;
  double kg;
  double share;
};

// Throws InvalidInput when the unit footprint is zero.
std::vector<BreakdownEntry> embodied_breakdown(const EmbodiedComponents& components);

struct ModularSavings {
  double saved_kg = 0.0;
  double fraction = 0.0;
};

// Emissions avoided when the `retained` parts are reused across an upgrade
// instead of being manufactured again.
ModularSavings modular_replacement_savings(const EmbodiedComponents& components,
                                           std::span<const EmbodiedPart> retained);
ModularSavings modular_replacement_savings(const EmbodiedComponents& components,
                                           std::span<const std::string> retained_names);

// RTU-weighted harmonic means of per-application acceleration, and of
// efficiency weighted by RTU x power.
DesignPoint equivalent_gains(const WorkloadMix& workload);

struct FleetEnergy {
  double device_kwh = 0.0;
  double grid_kwh = 0.0;
};

FleetEnergy fleet_lifetime_energy(const Fleet& fleet, double lifetime_years, double pue);

}  // namespace dcce
