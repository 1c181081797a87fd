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

#include <string>
#include <vector>

#include <json.hpp>

namespace dcce::cli {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Primary records of a command response, flattened to dotted columns. Cell
// text for numbers is the same shortest round-trip form the JSON uses.
Table tabulate(const std::string& command, const nlohmann::ordered_json& response);

std::string to_csv(const Table& table);
std::string to_text_table(const Table& table);

// Parses the output of to_csv.
Table parse_csv(const std::string& text);

}  // namespace dcce::cli
