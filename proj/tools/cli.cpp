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

#include "cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcce/dcce.h"
#include "format.hpp"
#include "server.hpp"

namespace dcce::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string data = ".";
  std::string scenario;
  std::string context;
  std::string candidate;
  std::vector<double> eta;
  std::string cap;
  std::optional<double> carbon_price;
  std::string format = "json";
  std::optional<long long> seed;
  bool lax = false;
  bool retain = false;

  std::string out_dir;
  std::optional<int> resolution;
  bool no_grid = false;
  std::vector<std::string> benchmarks;
  std::optional<double> years;
  std::optional<double> k;
  std::vector<std::string> locations;
  std::vector<std::string> candidates;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve_data(const std::string& data) {
  if (fs::is_directory(data)) return data;
#ifdef DCCE_BUNDLED_DATA
  const fs::path bundled = fs::path(DCCE_BUNDLED_DATA) / data;
  if (fs::is_directory(bundled)) return bundled;
#endif
  throw UsageError("data directory not found: " + data);
}

std::optional<fs::path> find_file(const std::string& name, const std::vector<fs::path>& dirs) {
  if (fs::is_regular_file(name)) return fs::path(name);
  for (const auto& d : dirs) {
    if (fs::is_regular_file(d / name)) return d / name;
  }
  return std::nullopt;
}

json parse_file(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

// Scenario given as a file (inline object) or as an id from the dataset.
json scenario_value(const std::string& arg, const fs::path& data) {
  if (auto path = find_file(arg, {data, data / "scenarios"})) {
    json j = parse_file(*path);
    if (j.is_object() && !j.contains("id")) j["id"] = path->stem().string();
    return j;
  }
  return arg.ends_with(".json") ? arg.substr(0, arg.size() - 5) : arg;
}

json context_value(const std::string& arg, const fs::path& data) {
  if (arg.ends_with(".json")) {
    if (auto path = find_file(arg, {data})) return parse_file(*path);
  }
  return arg;
}

json build_request(const std::string& command, const Options& o, const fs::path& data) {
  json req = json::object();
  if (o.seed) req["seed"] = *o.seed;
  if (command == "platforms" || command == "contexts" || command == "scenarios") return req;
  if (command == "trends") {
    if (!o.benchmarks.empty()) req["benchmarks"] = o.benchmarks;
    if (o.years) req["years_ahead"] = *o.years;
    return req;
  }

  if (!o.scenario.empty()) req["scenario"] = scenario_value(o.scenario, data);
  if (!o.candidate.empty()) req["candidate"] = o.candidate;
  json overrides = json::object();
  if (o.retain) overrides["decommission"] = false;

  if (command == "sweep") {
    if (o.carbon_price) throw UsageError("--carbon-price does not apply to sweep");
    if (!o.eta.empty()) req["eta_target"] = o.eta.back();
    if (!o.locations.empty()) req["locations"] = o.locations;
    if (!overrides.empty()) req["overrides"] = overrides;
    return req;
  }

  if (!o.context.empty()) req["context"] = context_value(o.context, data);
  json context_overrides = json::object();

  if (command == "evaluate") {
    if (!o.eta.empty()) overrides["demand_growth"] = o.eta.back();
    if (o.carbon_price) context_overrides["carbon_price_op_usd_per_t"] = *o.carbon_price;
  } else if (command == "dse") {
    if (!o.eta.empty()) req["eta"] = o.eta;
    if (o.carbon_price) req["carbon_price_usd_per_t"] = *o.carbon_price;
    if (o.no_grid) {
      req["grid"] = false;
    } else if (o.resolution) {
      req["grid"] = {{"resolution", *o.resolution}};
    }
  } else if (command == "optimize") {
    if (!o.eta.empty()) req["eta"] = o.eta.back();
    if (!o.cap.empty()) req["cap"] = o.cap;
    if (!o.candidates.empty()) req["candidates"] = o.candidates;
    if (o.carbon_price) context_overrides["carbon_price_usd_per_t"] = *o.carbon_price;
  } else if (command == "design") {
    if (!o.eta.empty()) req["eta_target"] = o.eta.back();
    if (o.k) req["k"] = *o.k;
    if (!o.benchmarks.empty()) {
      req["trend"] = {{"benchmark", o.benchmarks.front()}};
      if (o.years) req["trend"]["years_ahead"] = *o.years;
    }
    if (o.carbon_price) context_overrides["carbon_price_op_usd_per_t"] = *o.carbon_price;
  }
  if (!overrides.empty()) req["overrides"] = overrides;
  if (!context_overrides.empty()) req["context_overrides"] = context_overrides;
  return req;
}

void emit(const std::string& command, const std::string& body, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << body;
    return;
  }
  const auto table = tabulate(command, json::parse(body));
  out << (format == "csv" ? to_csv(table) : to_text_table(table));
}

void write_dse_files(const fs::path& dir, const std::string& body) {
  fs::create_directories(dir);
  const json j = json::parse(body);
  std::ofstream(dir / "dse.json", std::ios::trunc) << body;
  std::ofstream(dir / "curves.csv", std::ios::trunc) << to_csv(tabulate("dse", j));
  if (j["grid"].is_null()) return;
  const auto& g = j["grid"];
  Table t;
  t.columns = {"acceleration", "efficiency", "cost_usd", "cost_kg", "viable", "sustainable", "scalable",
               "viable_incentivized"};
  const std::size_t na = g["accelerations"].size();
  for (std::size_t i = 0; i < g["cost_usd"].size(); ++i) {
    t.rows.push_back({g["accelerations"][i % na].dump(), g["efficiencies"][i / na].dump(), g["cost_usd"][i].dump(),
                      g["cost_kg"][i].dump(), g["viable"][i].dump(), g["sustainable"][i].dump(),
                      g["scalable"][i].dump(), g["viable_incentivized"][i].dump()});
  }
  std::ofstream(dir / "grid.csv", std::ios::trunc) << to_csv(t);
}

struct DatasetHandle {
  dcce_dataset* ptr = nullptr;
  ~DatasetHandle() { dcce_dataset_free(ptr); }
};

ApiServer* active_server = nullptr;

extern "C" void on_signal(int) {
  if (active_server != nullptr) active_server->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Carbon and cost explorer for data center hardware upgrades", "dcce"};
  app.set_version_flag("--version", std::string(dcce_version()));
  app.require_subcommand(1);

  app.add_option("--data", o.data, "Dataset directory")->capture_default_str();
  app.add_option("--scenario", o.scenario, "Scenario file or id");
  app.add_option("--context", o.context, "Context location or JSON file");
  app.add_option("--candidate", o.candidate, "Candidate platform (default: the scenario's first)");
  app.add_option("--eta", o.eta, "Demand growth; repeat for several DSE targets")->check(CLI::PositiveNumber);
  app.add_option("--cap", o.cap, "Procurement cap: none|iso-carbon|iso-power|abs:<kg>");
  app.add_option("--carbon-price", o.carbon_price,
                 "Carbon price in USD per tonne: on operational emissions for evaluate and design, on all "
                 "emissions for optimize, the incentive of the dse incentivized curve")->check(CLI::NonNegativeNumber);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for scripted runs; every command is deterministic");
  app.add_flag("--lax", o.lax, "Treat unknown dataset fields as warnings");
  app.add_flag("--retain", o.retain, "Keep the legacy fleet instead of decommissioning it");

  app.add_subcommand("evaluate", "Assess one scenario: quadrant, incentive, growth limit");
  auto* dse = app.add_subcommand("dse", "Threshold curves and design-space grid");
  dse->add_option("--out", o.out_dir, "Also write dse.json, curves.csv and grid.csv here");
  dse->add_option("--resolution", o.resolution, "Grid points per axis")->check(CLI::Range(2, 4096));
  dse->add_flag("--no-grid", o.no_grid, "Curves only");
  auto* optimize = app.add_subcommand("optimize", "Procurement plan and pivot incentive");
  optimize->add_option("--candidates", o.candidates, "Candidate platforms (default: the scenario's)");
  auto* trends = app.add_subcommand("trends", "Doubling times per benchmark");
  trends->add_option("--benchmark", o.benchmarks, "Restrict to these benchmarks");
  trends->add_option("--years", o.years, "Projection horizon in years")->check(CLI::NonNegativeNumber);
  auto* design = app.add_subcommand("design", "Iso-EDP designs and their incentives");
  design->add_option("--k", o.k, "Iso-EDP product (default: the trend point's)")->check(CLI::PositiveNumber);
  design->add_option("--benchmark", o.benchmarks, "Project the trend point from this benchmark")->expected(1);
  design->add_option("--years", o.years, "Projection horizon in years")->check(CLI::NonNegativeNumber);
  auto* sweep = app.add_subcommand("sweep", "Per-location outcomes and required grid intensity");
  sweep->add_option("--location", o.locations, "Restrict to these locations");
  app.add_subcommand("platforms", "List the dataset's platforms");
  app.add_subcommand("contexts", "List the dataset's locations");
  app.add_subcommand("scenarios", "List the dataset's scenarios");
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--static", o.static_dir, "Directory of UI assets served at /")->check(CLI::ExistingDirectory);
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  fs::path data;
  json request;
  try {
    data = resolve_data(o.data);
    if (command != "serve") request = build_request(command, o, data);
  } catch (const std::exception& e) {
    err << "dcce: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  DatasetHandle dataset;
  char* diagnostics = nullptr;
  if (dcce_dataset_load(data.string().c_str(), o.lax ? 1 : 0, &dataset.ptr, &diagnostics) != DCCE_OK) {
    err << "dcce: " << dcce_last_error() << "\n";
    if (diagnostics != nullptr) emit(command, diagnostics, o.format == "table" ? "json" : o.format, out);
    dcce_string_free(diagnostics);
    return kExitError;
  }

  if (command == "serve") {
    ApiServer server(dataset.ptr, o.static_dir);
    const int port = server.bind(o.host, o.port);
    if (port < 0) {
      err << "dcce: cannot bind " << o.host << ":" << o.port << "\n";
      return kExitError;
    }
    err << "dcce: serving " << data.string() << " on http://" << o.host << ":" << port << "\n";
    active_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const bool ok = server.listen();
    active_server = nullptr;
    return ok ? kExitOk : kExitError;
  }

  char* body = nullptr;
  const dcce_status status = dcce_run(dataset.ptr, command.c_str(), request.dump().c_str(), &body);
  const std::string text = body != nullptr ? body : "";
  dcce_string_free(body);
  if (status != DCCE_OK) {
    err << "dcce " << command << ": " << dcce_last_error() << "\n";
    if (!text.empty()) emit(command, text, o.format == "table" ? "json" : o.format, out);
    return kExitError;
  }
  try {
    if (command == "dse" && !o.out_dir.empty()) write_dse_files(o.out_dir, text);
  } catch (const std::exception& e) {
    err << "dcce dse: " << e.what() << "\n";
    return kExitError;
  }
  emit(command, text, o.format, out);
  return kExitOk;
}

}  // namespace dcce::cli
