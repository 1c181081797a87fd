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

namespace dcce::units {

// Calendar model: one year is 8760 h, one month is a twelfth of a year.
inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kMonthsPerYear = 12.0;
inline constexpr double kDaysPerYear = 365.0;

inline constexpr double kKgPerTonne = 1000.0;
inline constexpr double kWattsPerKilowatt = 1000.0;
inline constexpr double kSecondsPerHour = 3600.0;

// Carbon prices cross every interface in USD/tCO2e and are stored per kg.
inline constexpr double per_tonne_to_per_kg(double usd_per_t) { return usd_per_t / kKgPerTonne; }
inline constexpr double per_kg_to_per_tonne(double usd_per_kg) { return usd_per_kg * kKgPerTonne; }

}  // namespace dcce::units
