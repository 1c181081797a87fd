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

#include "format.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace dcce::cli {

using json = nlohmann::ordered_json;

namespace {

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [key, child] : v.items()) flatten(child, prefix.empty() ? key : prefix + "." + key, out);
    return;
  }
  if (v.is_array()) {
    // Lists of scalars collapse to one cell; nested records are dropped.
    if (std::any_of(v.begin(), v.end(), [](const json& x) { return x.is_structured(); })) return;
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ";" : "") + cell_text(v[i]);
    out.emplace_back(prefix, joined);
    return;
  }
  out.emplace_back(prefix, cell_text(v));
}

Table from_records(const std::vector<json>& records) {
  Table t;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<std::string, std::string>>> flat;
  for (const auto& r : records) {
    flat.emplace_back();
    flatten(r, "", flat.back());
    for (const auto& [key, _] : flat.back()) {
      if (index.emplace(key, t.columns.size()).second) t.columns.push_back(key);
    }
  }
  for (const auto& cells : flat) {
    std::vector<std::string> row(t.columns.size());
    for (const auto& [key, text] : cells) row[index[key]] = text;
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<json> array_of(const json& response, const std::string& key) {
  std::vector<json> out;
  if (response.contains(key) && response[key].is_array()) {
    for (const auto& x : response[key]) out.push_back(x);
  }
  return out;
}

}  // namespace

Table tabulate(const std::string& command, const json& response) {
  if (response.contains("error")) return from_records({response["error"]});

  if (command == "dse") {
    std::vector<json> records;
    for (const auto& c : response["curves"]) {
      for (const auto& p : c["points"]) {
        records.push_back({{"kind", c["kind"]},
                           {"dimension", c["dimension"]},
                           {"eta", c["eta"]},
                           {"incentive_usd_per_t", c["incentive_usd_per_t"]},
                           {"budget", c["budget"]},
                           {"acceleration", p[0]},
                           {"efficiency", p[1]}});
      }
    }
    return from_records(records);
  }
  if (command == "optimize") {
    std::vector<json> records;
    const json& plan = response["plan"];
    for (auto o : response["options"]) {
      o["selected"] = plan.contains("platform_id") && plan["platform_id"] == o["platform_id"] &&
                      plan["decommission"] == o["decommission"];
      records.push_back(std::move(o));
    }
    return from_records(records);
  }
  if (command == "trends") return from_records(array_of(response, "fits"));
  if (command == "design") return from_records(array_of(response, "rows"));
  if (command == "sweep") return from_records(array_of(response, "locations"));
  if (command == "platforms") return from_records(array_of(response, "platforms"));
  if (command == "contexts") return from_records(array_of(response, "contexts"));
  if (command == "scenarios") return from_records(array_of(response, "scenarios"));

  json record = response;
  record.erase("schema_version");
  record.erase("command");
  return from_records({record});
}

namespace {

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream out;
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
    out << "\n";
  };
  write_row(table.columns);
  for (const auto& r : table.rows) write_row(r);
  return out.str();
}

Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      lines.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (any) {
    row.push_back(std::move(cell));
    lines.push_back(std::move(row));
  }
  Table t;
  if (lines.empty()) return t;
  t.columns = std::move(lines.front());
  t.rows.assign(std::make_move_iterator(lines.begin() + 1), std::make_move_iterator(lines.end()));
  return t;
}

namespace {

// Numbers shortened for reading; everything else verbatim.
std::string human(const std::string& text) {
  if (text.empty()) return "-";
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.find_first_not_of("0123456789+-.eE") != std::string::npos) {
    return text;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string to_text_table(const Table& table) {
  std::ostringstream out;
  if (table.rows.size() == 1) {
    std::size_t width = 0;
    for (const auto& c : table.columns) width = std::max(width, c.size());
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << table.columns[i] << std::string(width - table.columns[i].size() + 2, ' ') << human(table.rows[0][i])
          << "\n";
    }
    return out.str();
  }
  std::vector<std::size_t> width(table.columns.size());
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : table.rows) {
    cells.emplace_back();
    for (const auto& c : r) cells.back().push_back(human(c));
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    width[i] = table.columns[i].size();
    for (const auto& r : cells) width[i] = std::max(width[i], r[i].size());
  }
  auto write_row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << "\n";
  };
  write_row(table.columns);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  write_row(rule);
  for (const auto& r : cells) write_row(r);
  return out.str();
}

}  // namespace dcce::cli
