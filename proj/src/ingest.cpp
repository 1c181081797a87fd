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

#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/tokenizer.hpp>
#include <json.hpp>

#include "errors.hpp"
#include "units.hpp"

namespace dcce {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPlatformColumns = {
    "id",      "vendor",     "release_date", "unit_price_usd", "tdp_w",       "n_slots",     "emb_ic_kg",
    "emb_mem_kg", "emb_mb_kg", "emb_asm_kg",   "emb_tp_kg",      "emb_cool_kg", "emb_base_kg",
};
const std::vector<std::string> kBenchmarkColumns = {"platform_id", "benchmark",   "date",     "nodes",
                                                    "performance", "perf_unit"};
const std::vector<std::string> kBenchmarkOptional = {"energy_kwh_per_work", "power_w"};
const std::vector<std::string> kTargetColumns = {"label", "demand_growth", "acceleration", "efficiency"};
const std::vector<std::string> kTargetOptional = {"design_incentive_usd_per_t"};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_integer(const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return v;
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\\") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Collects diagnostics while reading one file.
class Reporter {
 public:
  Reporter(Diagnostics& sink, std::string path, bool lax) : sink_(sink), path_(std::move(path)), lax_(lax) {}

  void error(int row, int column, std::string message) {
    sink_.errors.push_back({path_, row, column, std::move(message)});
  }
  void warning(int row, int column, std::string message) {
    sink_.warnings.push_back({path_, row, column, std::move(message)});
  }
  void unknown(int row, int column, const std::string& what) {
    if (lax_) {
      warning(row, column, "unknown field '" + what + "' ignored");
    } else {
      error(row, column, "unknown field '" + what + "'");
    }
  }
  std::size_t error_count() const { return sink_.errors.size(); }
  const std::string& path() const { return path_; }

 private:
  Diagnostics& sink_;
  std::string path_;
  bool lax_;
};

struct CsvRow {
  int line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::map<std::string, int> columns;  // name -> 0-based index
  std::vector<CsvRow> rows;
  bool ok = false;
};

CsvTable read_csv(const fs::path& path, Reporter& report, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
  CsvTable table;
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    report.error(0, 0, e.what());
    return table;
  }
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line);
      fields.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error& e) {
      report.error(line_no, 0, std::string("malformed CSV: ") + e.what());
      continue;
    }
    for (auto& f : fields) {
      const auto b = f.find_first_not_of(" \t");
      const auto e = f.find_last_not_of(" \t");
      f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    if (!have_header) {
      have_header = true;
      width = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& name = fields[i];
        const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                           std::find(optional.begin(), optional.end(), name) != optional.end();
        if (!known) {
          report.unknown(line_no, static_cast<int>(i + 1), name);
          continue;
        }
        if (!table.columns.emplace(name, static_cast<int>(i)).second) {
          report.error(line_no, static_cast<int>(i + 1), "duplicate column '" + name + "'");
        }
      }
      for (const auto& name : required) {
        if (!table.columns.contains(name)) report.error(line_no, 0, "missing column '" + name + "'");
      }
      continue;
    }
    if (fields.size() != width) {
      report.error(line_no, 0,
                   "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
      continue;
    }
    table.rows.push_back({line_no, std::move(fields)});
  }
  if (!have_header) report.error(0, 0, "missing header row");
  table.ok = have_header;
  for (const auto& name : required) table.ok = table.ok && table.columns.contains(name);
  return table;
}

// Typed access to one CSV row with per-cell diagnostics.
class RowReader {
 public:
  RowReader(const CsvTable& table, const CsvRow& row, Reporter& report) : table_(table), row_(row), report_(report) {}

  bool has(const std::string& column) const {
    auto it = table_.columns.find(column);
    return it != table_.columns.end() && !row_.fields[static_cast<std::size_t>(it->second)].empty();
  }

  std::string text(const std::string& column) {
    const auto& v = cell(column);
    if (v.empty()) fail(column, "'" + column + "' must not be empty");
    return v;
  }

  double number(const std::string& column) {
    const auto& v = cell(column);
    if (auto d = parse_double(v)) return *d;
    fail(column, "'" + column + "' is not a number: '" + v + "'");
    return 0.0;
  }

  std::optional<double> optional_number(const std::string& column) {
    if (!has(column)) return std::nullopt;
    return number(column);
  }

  std::int64_t integer(const std::string& column) {
    const auto& v = cell(column);
    if (auto i = parse_integer(v)) return *i;
    fail(column, "'" + column + "' is not an integer: '" + v + "'");
    return 0;
  }

  Date date(const std::string& column) {
    try {
      return parse_date(cell(column));
    } catch (const InvalidInput& e) {
      fail(column, e.what());
      return {};
    }
  }

  void fail(const std::string& column, std::string message) {
    report_.error(row_.line, column_number(column), std::move(message));
  }
  void fail_row(std::string message) { report_.error(row_.line, 0, std::move(message)); }
  int line() const { return row_.line; }

 private:
  const std::string& cell(const std::string& column) const {
    return row_.fields[static_cast<std::size_t>(table_.columns.at(column))];
  }
  int column_number(const std::string& column) const {
    auto it = table_.columns.find(column);
    return it == table_.columns.end() ? 0 : it->second + 1;
  }

  const CsvTable& table_;
  const CsvRow& row_;
  Reporter& report_;
};

std::vector<PlatformSpec> read_platforms(const fs::path& path, Reporter& report) {
  std::vector<PlatformSpec> out;
  const auto table = read_csv(path, report, kPlatformColumns, {});
  if (!table.ok) return out;
  std::set<std::string> ids;
  for (const auto& row : table.rows) {
    const auto before = report.error_count();
    RowReader r(table, row, report);
    PlatformSpec p;
    p.id = r.text("id");
    p.vendor = r.has("vendor") ? r.text("vendor") : std::string();
    p.release_date = r.date("release_date");
    p.unit_price = r.number("unit_price_usd");
    p.tdp_w = r.number("tdp_w");
    p.embodied.n_slots = r.integer("n_slots");
    p.embodied.ic = r.number("emb_ic_kg");
    p.embodied.mem = r.number("emb_mem_kg");
    p.embodied.mainboard = r.number("emb_mb_kg");
    p.embodied.assembly = r.number("emb_asm_kg");
    p.embodied.transport = r.number("emb_tp_kg");
    p.embodied.cooling = r.number("emb_cool_kg");
    p.embodied.server_base = r.number("emb_base_kg");
    if (report.error_count() != before) continue;
    try {
      p.validate();
    } catch (const InvalidInput& e) {
      r.fail_row(e.what());
      continue;
    }
    if (!ids.insert(p.id).second) {
      r.fail("id", "duplicate platform id '" + p.id + "'");
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<BenchmarkRow> read_benchmarks(const fs::path& path, Reporter& report,
                                          const std::set<std::string>& platform_ids) {
  std::vector<BenchmarkRow> out;
  const auto table = read_csv(path, report, kBenchmarkColumns, kBenchmarkOptional);
  if (!table.ok) return out;
  for (const auto& row : table.rows) {
    const auto before = report.error_count();
    RowReader r(table, row, report);
    BenchmarkRow b;
    b.platform_id = r.text("platform_id");
    b.benchmark = r.text("benchmark");
    b.date = r.date("date");
    b.nodes = r.integer("nodes");
    b.performance = r.number("performance");
    const auto unit = r.text("perf_unit");
    if (unit == "rate") {
      b.unit = PerfUnit::kRate;
    } else if (unit == "time") {
      b.unit = PerfUnit::kTime;
    } else {
      r.fail("perf_unit", "perf_unit must be 'rate' or 'time', got '" + unit + "'");
    }
    b.energy_kwh_per_work = r.optional_number("energy_kwh_per_work");
    b.power_w = r.optional_number("power_w");
    if (report.error_count() != before) continue;
    if (b.nodes < 1) r.fail("nodes", "nodes must be at least 1");
    if (!(b.performance > 0.0) || !std::isfinite(b.performance)) r.fail("performance", "performance must be positive");
    if (b.energy_kwh_per_work && !(*b.energy_kwh_per_work > 0.0)) {
      r.fail("energy_kwh_per_work", "energy_kwh_per_work must be positive");
    }
    if (b.power_w && !(*b.power_w > 0.0)) r.fail("power_w", "power_w must be positive");
    if (!platform_ids.contains(b.platform_id)) {
      r.fail("platform_id", "dangling reference: unknown platform '" + b.platform_id + "'");
    }
    if (report.error_count() != before) continue;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<DesignTarget> read_targets(const fs::path& path, Reporter& report) {
  std::vector<DesignTarget> out;
  const auto table = read_csv(path, report, kTargetColumns, kTargetOptional);
  if (!table.ok) return out;
  for (const auto& row : table.rows) {
    const auto before = report.error_count();
    RowReader r(table, row, report);
    DesignTarget t;
    t.label = r.text("label");
    t.demand_growth = r.number("demand_growth");
    t.acceleration = r.number("acceleration");
    t.efficiency = r.number("efficiency");
    t.design_incentive_usd_per_t = r.optional_number("design_incentive_usd_per_t");
    if (report.error_count() != before) continue;
    if (!(t.demand_growth >= 1.0)) r.fail("demand_growth", "demand_growth must be at least 1");
    if (!(t.acceleration > 0.0)) r.fail("acceleration", "acceleration must be positive");
    if (!(t.efficiency > 0.0)) r.fail("efficiency", "efficiency must be positive");
    if (report.error_count() != before) continue;
    out.push_back(std::move(t));
  }
  return out;
}

// Typed access to a JSON object with unknown-key detection.
class ObjectReader {
 public:
  ObjectReader(const json& object, Reporter& report, int row, std::string where)
      : object_(object), report_(report), row_(row), where_(std::move(where)) {
    if (!object_.is_object()) fail(where_ + " must be an object");
  }

  bool valid() const { return object_.is_object(); }

  const json* get(const std::string& key, bool required) {
    seen_.insert(key);
    if (!object_.is_object()) return nullptr;
    auto it = object_.find(key);
    if (it == object_.end() || it->is_null()) {
      if (required) fail("missing field '" + qualified(key) + "'");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const std::string& key, bool required = true) {
    const json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      fail("field '" + qualified(key) + "' must be a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key, bool required = true) {
    const json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) {
      fail("field '" + qualified(key) + "' must be an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::string> text(const std::string& key, bool required = true) {
    const json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      fail("field '" + qualified(key) + "' must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key, bool required = true) {
    const json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) {
      fail("field '" + qualified(key) + "' must be a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  void finish() {
    if (!object_.is_object()) return;
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) report_.unknown(row_, 0, qualified(key));
    }
  }

  void fail(const std::string& message) { report_.error(row_, 0, message); }
  std::string qualified(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }
  int row() const { return row_; }
  Reporter& report() { return report_; }

 private:
  const json& object_;
  Reporter& report_;
  int row_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_json_file(const fs::path& path, Reporter& report) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    report.error(0, 0, std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    report.error(0, 0, e.what());
  }
  return json();
}

std::optional<Context> read_context(const json& value, Reporter& report, int row) {
  const auto before = report.error_count();
  ObjectReader r(value, report, row, "");
  if (!r.valid()) return std::nullopt;
  Context c;
  c.location = r.text("location").value_or("");
  c.carbon_intensity = r.number("ci_kg_per_kwh").value_or(0.0);
  c.elec_price = r.number("elec_price_usd_per_kwh").value_or(0.0);
  c.pue = r.number("pue").value_or(1.0);
  c.carbon_price_op_usd_per_t = r.number("carbon_price_op_usd_per_t", false).value_or(0.0);
  c.carbon_price_ca_usd_per_t = r.number("carbon_price_ca_usd_per_t", false).value_or(0.0);
  c.dc_count = r.number("dc_count", false).value_or(0.0);
  if (const json* goal = r.get("goal", false)) {
    if (goal->is_string() && goal->get<std::string>() == "iso-carbon") {
      c.goal = GoalPolicy::iso_carbon();
    } else if (goal->is_object()) {
      ObjectReader g(*goal, report, row, "goal");
      if (goal->contains("iso-carbon")) {
        g.get("iso-carbon", false);
        c.goal = GoalPolicy::iso_carbon();
      } else if (auto kg = g.number("absolute")) {
        c.goal = GoalPolicy::absolute(*kg);
      }
      g.finish();
    } else {
      r.fail("field 'goal' must be \"iso-carbon\" or {\"absolute\": <kg>}");
    }
  }
  r.finish();
  if (c.location.empty() && report.error_count() == before) r.fail("location must not be empty");
  if (report.error_count() != before) return std::nullopt;
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    r.fail(e.what());
    return std::nullopt;
  }
  return c;
}

std::optional<ScenarioFile> read_scenario(const json& value, Reporter& report, const std::string& default_id) {
  const auto before = report.error_count();
  ObjectReader r(value, report, 0, "");
  if (!r.valid()) return std::nullopt;
  ScenarioFile s;
  s.id = r.text("id", false).value_or(default_id);
  if (const json* base = r.get("baseline", true)) {
    ObjectReader b(*base, report, 0, "baseline");
    s.baseline_platform_id = b.text("platform_id").value_or("");
    s.count = b.integer("count").value_or(1);
    s.utilization = b.number("utilization", false).value_or(1.0);
    b.finish();
  }
  if (const json* ids = r.get("candidate_ids", true)) {
    if (!ids->is_array()) {
      r.fail("field 'candidate_ids' must be an array of strings");
    } else {
      for (const auto& id : *ids) {
        if (id.is_string()) {
          s.candidate_ids.push_back(id.get<std::string>());
        } else {
          r.fail("field 'candidate_ids' must be an array of strings");
        }
      }
    }
  }
  s.lifetime_years = r.number("lifetime_years").value_or(4.0);
  s.demand_growth = r.number("demand_growth", false).value_or(1.0);
  s.decommission = r.boolean("decommission", false).value_or(true);
  s.gross_income_usd = r.number("gross_income_usd", false);
  s.reference_price_usd_per_hour = r.number("reference_price_usd_per_hour", false);
  s.reference_platform_id = r.text("reference_platform_id", false);
  if (auto rounding = r.text("rounding", false)) {
    if (*rounding == "continuous") {
      s.rounding = Rounding::kContinuous;
    } else if (*rounding == "ceil") {
      s.rounding = Rounding::kCeil;
    } else {
      r.fail("field 'rounding' must be 'continuous' or 'ceil'");
    }
  }
  if (const json* load = r.get("workload", true)) {
    if (!load->is_array()) {
      r.fail("field 'workload' must be an array");
    } else {
      for (std::size_t i = 0; i < load->size(); ++i) {
        ObjectReader w((*load)[i], report, 0, "workload[" + std::to_string(i) + "]");
        WorkloadWeight entry;
        entry.app = w.text("app").value_or("");
        entry.weight = w.number("weight", false).value_or(1.0);
        if (const json* syn = w.get("synthetic", false)) {
          ObjectReader g(*syn, report, 0, w.qualified("synthetic"));
          entry.synthetic = DesignPoint{g.number("acceleration").value_or(1.0), g.number("efficiency").value_or(1.0)};
          g.finish();
        }
        w.finish();
        if (!(entry.weight > 0.0)) w.fail("workload weights must be positive");
        if (entry.synthetic && (!(entry.synthetic->acceleration > 0.0) || !(entry.synthetic->efficiency > 0.0))) {
          w.fail("synthetic gains must be positive");
        }
        s.workload.push_back(std::move(entry));
      }
    }
  }
  r.finish();
  if (report.error_count() != before) return std::nullopt;

  if (s.id.empty()) r.fail("scenario id must not be empty");
  if (s.count < 1) r.fail("baseline.count must be at least 1");
  if (!(s.utilization > 0.0 && s.utilization <= 1.0)) r.fail("baseline.utilization must be in (0, 1]");
  if (s.candidate_ids.empty()) r.fail("candidate_ids must not be empty");
  if (!(s.lifetime_years > 0.0)) r.fail("lifetime_years must be positive");
  if (!(s.demand_growth >= 1.0)) r.fail("demand_growth must be at least 1");
  if (s.workload.empty()) r.fail("workload must not be empty");
  if (s.gross_income_usd.has_value() == s.reference_price_usd_per_hour.has_value()) {
    r.fail("exactly one of gross_income_usd and reference_price_usd_per_hour is required");
  }
  if (s.gross_income_usd && !(*s.gross_income_usd >= 0.0)) r.fail("gross_income_usd must be non-negative");
  if (s.reference_price_usd_per_hour && !(*s.reference_price_usd_per_hour >= 0.0)) {
    r.fail("reference_price_usd_per_hour must be non-negative");
  }
  std::set<std::string> apps;
  for (const auto& w : s.workload) {
    if (!apps.insert(w.app).second) r.fail("duplicate workload app '" + w.app + "'");
  }
  if (report.error_count() != before) return std::nullopt;
  return s;
}

void check_scenario_references(const ScenarioFile& s, const Dataset& d, Reporter& report) {
  std::set<std::string> ids;
  for (const auto& p : d.platforms) ids.insert(p.id);
  std::set<std::pair<std::string, std::string>> measured;
  for (const auto& b : d.benchmarks) measured.emplace(b.benchmark, b.platform_id);

  auto need_platform = [&](const std::string& id, const std::string& what) {
    if (ids.contains(id)) return true;
    report.error(0, 0, "dangling reference: " + what + " '" + id + "' is not a known platform");
    return false;
  };
  std::vector<std::string> measured_on;
  if (need_platform(s.baseline_platform_id, "baseline.platform_id")) measured_on.push_back(s.baseline_platform_id);
  for (const auto& c : s.candidate_ids) {
    if (need_platform(c, "candidate")) measured_on.push_back(c);
  }
  if (s.reference_platform_id && need_platform(*s.reference_platform_id, "reference_platform_id")) {
    measured_on.push_back(*s.reference_platform_id);
  }
  for (const auto& w : s.workload) {
    if (w.synthetic) continue;
    for (const auto& p : measured_on) {
      if (!measured.contains({w.app, p})) {
        report.error(0, 0, "workload app '" + w.app + "' has no benchmark record on platform '" + p +
                               "' and is not declared synthetic");
      }
    }
  }
}

json scenario_to_json(const ScenarioFile& s) {
  json j;
  j["id"] = s.id;
  j["baseline"] = {{"platform_id", s.baseline_platform_id}, {"count", s.count}, {"utilization", s.utilization}};
  j["candidate_ids"] = s.candidate_ids;
  j["lifetime_years"] = s.lifetime_years;
  j["demand_growth"] = s.demand_growth;
  j["decommission"] = s.decommission;
  if (s.gross_income_usd) j["gross_income_usd"] = *s.gross_income_usd;
  if (s.reference_price_usd_per_hour) j["reference_price_usd_per_hour"] = *s.reference_price_usd_per_hour;
  if (s.reference_platform_id) j["reference_platform_id"] = *s.reference_platform_id;
  j["rounding"] = s.rounding == Rounding::kCeil ? "ceil" : "continuous";
  json load = json::array();
  for (const auto& w : s.workload) {
    json e = {{"app", w.app}, {"weight", w.weight}};
    if (w.synthetic) {
      e["synthetic"] = {{"acceleration", w.synthetic->acceleration}, {"efficiency", w.synthetic->efficiency}};
    }
    load.push_back(std::move(e));
  }
  j["workload"] = std::move(load);
  return j;
}

json context_to_json(const Context& c) {
  json j = {{"location", c.location},
            {"ci_kg_per_kwh", c.carbon_intensity},
            {"elec_price_usd_per_kwh", c.elec_price},
            {"pue", c.pue},
            {"carbon_price_op_usd_per_t", c.carbon_price_op_usd_per_t},
            {"carbon_price_ca_usd_per_t", c.carbon_price_ca_usd_per_t},
            {"dc_count", c.dc_count}};
  if (c.goal.kind == GoalPolicy::Kind::kAbsolute) {
    j["goal"] = {{"absolute", c.goal.budget_kg}};
  } else {
    j["goal"] = "iso-carbon";
  }
  return j;
}

const BenchmarkRecord* find_frontier(const std::vector<BenchmarkRecord>& frontier, const std::string& app,
                                     const std::string& platform) {
  for (const auto& r : frontier) {
    if (r.benchmark == app && r.platform_id == platform) return &r;
  }
  return nullptr;
}

}  // namespace

std::string Diagnostic::to_string() const {
  std::string out = path;
  if (row > 0) out += ":" + std::to_string(row);
  if (column > 0) out += ":" + std::to_string(column);
  return out + ": " + message;
}

namespace {

std::string summarize(const Diagnostics& d) {
  std::string out = "dataset failed to load with " + std::to_string(d.errors.size()) + " error(s)";
  if (!d.errors.empty()) out += "; first: " + d.errors.front().to_string();
  return out;
}

}  // namespace

LoadError::LoadError(Diagnostics diagnostics) : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const PlatformSpec& Dataset::platform(const std::string& id) const {
  for (const auto& p : platforms) {
    if (p.id == id) return p;
  }
  throw NotFound("unknown platform '" + id + "'");
}

const Context& Dataset::context(const std::string& location) const {
  for (const auto& c : contexts) {
    if (c.location == location) return c;
  }
  throw NotFound("unknown context '" + location + "'");
}

const ScenarioFile& Dataset::scenario(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return s;
  }
  throw NotFound("unknown scenario '" + id + "'");
}

std::vector<BenchmarkRecord> Dataset::trend_records() const {
  std::vector<BenchmarkRecord> out;
  out.reserve(benchmarks.size());
  for (const auto& row : benchmarks) {
    const auto& p = platform(row.platform_id);
    BenchmarkRecord r;
    r.platform_id = row.platform_id;
    r.benchmark = row.benchmark;
    r.date = p.release_date.ok() ? p.release_date : row.date;
    r.nodes = row.nodes;
    r.performance = row.unit == PerfUnit::kTime ? 1.0 / row.performance : row.performance;
    r.energy_kwh_per_work = row.energy_kwh_per_work;
    r.power_w = row.power_w ? row.power_w : std::optional<double>(p.tdp_w);
    out.push_back(std::move(r));
  }
  return out;
}

LoadResult try_load_dataset(const fs::path& root, const LoadOptions& options) {
  LoadResult result;
  auto& diag = result.diagnostics;
  if (!fs::is_directory(root)) {
    diag.errors.push_back({root.string(), 0, 0, "dataset directory does not exist"});
    return result;
  }
  Dataset d;

  Reporter platforms(diag, (root / "platforms.csv").string(), options.lax);
  d.platforms = read_platforms(root / "platforms.csv", platforms);
  std::set<std::string> platform_ids;
  for (const auto& p : d.platforms) platform_ids.insert(p.id);

  Reporter benchmarks(diag, (root / "benchmarks.csv").string(), options.lax);
  d.benchmarks = read_benchmarks(root / "benchmarks.csv", benchmarks, platform_ids);

  Reporter contexts(diag, (root / "contexts.json").string(), options.lax);
  const json ctx = parse_json_file(root / "contexts.json", contexts);
  if (!ctx.is_null()) {
    if (!ctx.is_array()) {
      contexts.error(0, 0, "contexts.json must hold an array of contexts");
    } else {
      std::set<std::string> names;
      for (std::size_t i = 0; i < ctx.size(); ++i) {
        const int row = static_cast<int>(i + 1);
        if (auto c = read_context(ctx[i], contexts, row)) {
          if (!names.insert(c->location).second) {
            contexts.error(row, 0, "duplicate context '" + c->location + "'");
          } else {
            d.contexts.push_back(std::move(*c));
          }
        }
      }
    }
  }

  std::vector<fs::path> scenario_files;
  if (fs::exists(root / "scenario.json")) scenario_files.push_back(root / "scenario.json");
  if (fs::is_directory(root / "scenarios")) {
    std::vector<fs::path> more;
    for (const auto& entry : fs::directory_iterator(root / "scenarios")) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") more.push_back(entry.path());
    }
    std::sort(more.begin(), more.end());
    scenario_files.insert(scenario_files.end(), more.begin(), more.end());
  }
  std::set<std::string> scenario_ids;
  for (const auto& file : scenario_files) {
    Reporter report(diag, file.string(), options.lax);
    const json j = parse_json_file(file, report);
    if (j.is_null()) continue;
    if (auto s = read_scenario(j, report, file.stem().string())) {
      check_scenario_references(*s, d, report);
      if (!scenario_ids.insert(s->id).second) {
        report.error(0, 0, "duplicate scenario id '" + s->id + "'");
        continue;
      }
      d.scenarios.push_back(std::move(*s));
    }
  }
  std::sort(d.scenarios.begin(), d.scenarios.end(),
            [](const ScenarioFile& a, const ScenarioFile& b) { return a.id < b.id; });

  if (fs::exists(root / "design_targets.csv")) {
    Reporter targets(diag, (root / "design_targets.csv").string(), options.lax);
    d.design_targets = read_targets(root / "design_targets.csv", targets);
  }

  if (diag.ok()) result.dataset = std::move(d);
  return result;
}

Dataset load_dataset(const fs::path& root, const LoadOptions& options) {
  auto result = try_load_dataset(root, options);
  if (!result.dataset) throw LoadError(std::move(result.diagnostics));
  return std::move(*result.dataset);
}

void save_dataset(const Dataset& d, const fs::path& root) {
  fs::create_directories(root);

  std::ostringstream platforms;
  for (std::size_t i = 0; i < kPlatformColumns.size(); ++i) platforms << (i ? "," : "") << kPlatformColumns[i];
  platforms << "\n";
  for (const auto& p : d.platforms) {
    const auto& e = p.embodied;
    platforms << csv_field(p.id) << ',' << csv_field(p.vendor) << ',' << format_date(p.release_date) << ','
              << format_number(p.unit_price) << ',' << format_number(p.tdp_w) << ',' << e.n_slots << ','
              << format_number(e.ic) << ',' << format_number(e.mem) << ',' << format_number(e.mainboard) << ','
              << format_number(e.assembly) << ',' << format_number(e.transport) << ',' << format_number(e.cooling)
              << ',' << format_number(e.server_base) << "\n";
  }
  write_file(root / "platforms.csv", platforms.str());

  std::ostringstream bench;
  bench << "platform_id,benchmark,date,nodes,performance,perf_unit,energy_kwh_per_work,power_w\n";
  for (const auto& b : d.benchmarks) {
    bench << csv_field(b.platform_id) << ',' << csv_field(b.benchmark) << ',' << format_date(b.date) << ','
          << b.nodes << ',' << format_number(b.performance) << ',' << (b.unit == PerfUnit::kTime ? "time" : "rate")
          << ',' << (b.energy_kwh_per_work ? format_number(*b.energy_kwh_per_work) : "") << ','
          << (b.power_w ? format_number(*b.power_w) : "") << "\n";
  }
  write_file(root / "benchmarks.csv", bench.str());

  json contexts = json::array();
  for (const auto& c : d.contexts) contexts.push_back(context_to_json(c));
  write_file(root / "contexts.json", contexts.dump(2) + "\n");

  if (!d.scenarios.empty()) {
    fs::create_directories(root / "scenarios");
    for (const auto& s : d.scenarios) {
      write_file(root / "scenarios" / (s.id + ".json"), scenario_to_json(s).dump(2) + "\n");
    }
  }

  if (!d.design_targets.empty()) {
    std::ostringstream targets;
    targets << "label,demand_growth,acceleration,efficiency,design_incentive_usd_per_t\n";
    for (const auto& t : d.design_targets) {
      targets << csv_field(t.label) << ',' << format_number(t.demand_growth) << ','
              << format_number(t.acceleration) << ',' << format_number(t.efficiency) << ','
              << (t.design_incentive_usd_per_t ? format_number(*t.design_incentive_usd_per_t) : "") << "\n";
    }
    write_file(root / "design_targets.csv", targets.str());
  }
}

ScenarioFile parse_scenario_json(const std::string& text, const std::string& default_id) {
  Diagnostics diag;
  Reporter report(diag, "scenario", false);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("invalid scenario JSON: ") + e.what());
  }
  auto s = read_scenario(j, report, default_id);
  if (!s) throw InvalidInput(diag.errors.empty() ? "invalid scenario" : diag.errors.front().message);
  return *s;
}

Context parse_context_json(const std::string& text) {
  Diagnostics diag;
  Reporter report(diag, "context", false);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("invalid context JSON: ") + e.what());
  }
  auto c = read_context(j, report, 0);
  if (!c) throw InvalidInput(diag.errors.empty() ? "invalid context" : diag.errors.front().message);
  return *c;
}

WorkloadMix derive_workload_mix(const Dataset& dataset, const std::string& baseline_id,
                                const std::string& candidate_id, std::span<const WorkloadWeight> weights,
                                double device_hours) {
  if (weights.empty()) throw InvalidInput("workload must not be empty");
  if (!(device_hours > 0.0)) throw InvalidInput("device hours must be positive");
  const auto& baseline = dataset.platform(baseline_id);
  dataset.platform(candidate_id);
  const auto records = dataset.trend_records();
  const auto frontier = select_frontier(records, FrontierMode::kTopPerformance);

  double total_weight = 0.0;
  for (const auto& w : weights) total_weight += w.weight;

  WorkloadMix mix;
  for (const auto& w : weights) {
    WorkloadEntry entry;
    entry.app_id = w.app;
    entry.rtu = w.weight / total_weight * device_hours;
    if (w.synthetic) {
      entry.power_w = baseline.tdp_w;
      entry.acceleration = w.synthetic->acceleration;
      entry.efficiency = w.synthetic->efficiency;
    } else {
      const auto* base = find_frontier(frontier, w.app, baseline_id);
      const auto* cand = find_frontier(frontier, w.app, candidate_id);
      if (base == nullptr || cand == nullptr) {
        throw InvalidInput("unmatchable app '" + w.app + "': no benchmark pair for '" + baseline_id + "' and '" +
                           candidate_id + "'");
      }
      entry.power_w = *base->power_w;
      entry.acceleration = cand->per_node_performance() / base->per_node_performance();
      entry.efficiency = *cand->efficiency() / *base->efficiency();
    }
    mix.entries.push_back(std::move(entry));
  }
  return mix;
}

namespace {

double lifetime_device_hours(const ScenarioFile& s) {
  return static_cast<double>(s.count) * s.utilization * s.lifetime_years * units::kHoursPerYear;
}

}  // namespace

double estimate_gross_income(const Dataset& dataset, const ScenarioFile& scenario, double usd_per_hour) {
  if (!(usd_per_hour >= 0.0)) throw InvalidInput("reference price must be non-negative");
  double hours = lifetime_device_hours(scenario);
  if (scenario.reference_platform_id && *scenario.reference_platform_id != scenario.baseline_platform_id) {
    const auto mix = derive_workload_mix(dataset, scenario.baseline_platform_id, *scenario.reference_platform_id,
                                         scenario.workload, hours);
    hours /= equivalent_gains(mix).acceleration;
  }
  return usd_per_hour * hours;
}

DeploymentScenario resolve_scenario(const Dataset& dataset, const ScenarioFile& file, const std::string& candidate_id) {
  const std::string& chosen = candidate_id.empty() ? file.candidate_ids.front() : candidate_id;
  DeploymentScenario s;
  s.id = file.id;
  s.baseline = Fleet{dataset.platform(file.baseline_platform_id), file.count, file.utilization};
  s.candidate = dataset.platform(chosen);
  s.workload = derive_workload_mix(dataset, file.baseline_platform_id, chosen, file.workload,
                                   lifetime_device_hours(file));
  s.lifetime_years = file.lifetime_years;
  s.gross_income = file.gross_income_usd ? *file.gross_income_usd
                                         : estimate_gross_income(dataset, file, *file.reference_price_usd_per_hour);
  s.demand_growth = file.demand_growth;
  s.decommission = file.decommission;
  s.rounding = file.rounding;
  s.validate();
  return s;
}

std::vector<Candidate> resolve_candidates(const Dataset& dataset, const ScenarioFile& file) {
  std::vector<Candidate> out;
  for (const auto& id : file.candidate_ids) {
    const auto s = resolve_scenario(dataset, file, id);
    out.push_back({s.candidate, s.workload});
  }
  return out;
}

}  // namespace dcce
