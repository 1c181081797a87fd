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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cli.hpp"
#include "dcce/dcce.h"
#include "format.hpp"
#include "server.hpp"

using doctest::Approx;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const std::string kData = DCCE_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dcce::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Loaded {
  explicit Loaded(const std::string& name) {
    REQUIRE(dcce_dataset_load((kData + "/" + name).c_str(), 0, &ptr, nullptr) == DCCE_OK);
  }
  ~Loaded() { dcce_dataset_free(ptr); }
  dcce_dataset* ptr = nullptr;
};

std::pair<dcce_status, std::string> run_api(const dcce_dataset* d, const char* command, const char* request) {
  char* out = nullptr;
  const auto status = dcce_run(d, command, request, &out);
  std::string text = out != nullptr ? out : "";
  dcce_string_free(out);
  return {status, text};
}

// Server on a free local port for the lifetime of the object.
class LiveServer {
 public:
  explicit LiveServer(const dcce_dataset* d, std::string static_dir = {}) : server_(d, std::move(static_dir)) {
    port_ = server_.bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen(); });
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30);
    return c;
  }

 private:
  dcce::cli::ApiServer server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("C API lifecycle and status codes") {
  CHECK(std::string(dcce_version()).size() > 0);
  CHECK(std::string(dcce_status_string(DCCE_ERR_BAD_REQUEST)) == "bad request");

  dcce_dataset* d = nullptr;
  CHECK(dcce_dataset_load(nullptr, 0, &d, nullptr) == DCCE_ERR_INVALID_ARGUMENT);
  CHECK(std::string(dcce_last_error()).size() > 0);

  char* diag = nullptr;
  CHECK(dcce_dataset_load((kData + "/nowhere").c_str(), 0, &d, &diag) == DCCE_ERR_LOAD);
  CHECK(d == nullptr);
  REQUIRE(diag != nullptr);
  const auto body = json::parse(diag);
  dcce_string_free(diag);
  CHECK(body["error"]["type"] == "load_error");
  CHECK_FALSE(body["error"]["diagnostics"].empty());

  Loaded s0("fixtures/s0");
  auto [ok, text] = run_api(s0.ptr, "evaluate", "");
  CHECK(ok == DCCE_OK);
  CHECK(std::string(dcce_last_error()).empty());
  CHECK(json::parse(text)["required_incentive_usd_per_t"].get<double>() == Approx(2603.8812785).epsilon(1e-9));

  CHECK(run_api(s0.ptr, "evaluate", "{oops").first == DCCE_ERR_BAD_REQUEST);
  CHECK(run_api(s0.ptr, "evaluate", R"({"context": "mars"})").first == DCCE_ERR_BAD_REQUEST);
  CHECK(run_api(s0.ptr, "warp", "{}").first == DCCE_ERR_NOT_FOUND);
  CHECK(run_api(nullptr, "evaluate", "{}").first == DCCE_ERR_INVALID_ARGUMENT);
  CHECK(dcce_run(s0.ptr, "evaluate", "{}", nullptr) == DCCE_ERR_INVALID_ARGUMENT);

  auto [engine, error_text] = run_api(s0.ptr, "evaluate", R"({"overrides": {"lifetime_years": -1}})");
  CHECK(engine == DCCE_ERR_ENGINE);
  CHECK(json::parse(error_text)["error"]["type"] == "invalid_input");
}

TEST_CASE("C API save round-trips") {
  Loaded recon("reconstruction");
  const fs::path dir = fs::temp_directory_path() / ("dcce-capi-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  REQUIRE(dcce_dataset_save(recon.ptr, dir.string().c_str()) == DCCE_OK);
  dcce_dataset* again = nullptr;
  REQUIRE(dcce_dataset_load(dir.string().c_str(), 0, &again, nullptr) == DCCE_OK);
  for (const char* command : {"platforms", "contexts", "scenarios"}) {
    CHECK(run_api(again, command, "{}").second == run_api(recon.ptr, command, "{}").second);
  }
  dcce_dataset_free(again);
  fs::remove_all(dir);
  CHECK(dcce_dataset_save(nullptr, "x") == DCCE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("C API handles are shareable across threads") {
  Loaded recon("reconstruction");
  const char* request = R"({"scenario": "v100-fleet", "context": "us", "cap": "iso-power"})";
  const auto expected = run_api(recon.ptr, "optimize", request).second;
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < 8; ++i) {
    jobs.push_back(std::async(std::launch::async, [&] { return run_api(recon.ptr, "optimize", request).second; }));
  }
  for (auto& j : jobs) CHECK(j.get() == expected);
}

TEST_CASE("cli evaluate on the s0 fixture") {
  const auto r = cli({"evaluate", "--data", kData + "/fixtures/s0", "--scenario", "s0.json", "--context", "s0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["required_incentive_usd_per_t"].get<double>() == Approx(2603.9).epsilon(1e-3));
  CHECK(j["scenario"] == "s0");

  // Bundled dataset names resolve without a path; a scenario file path works too.
  const auto by_name = cli({"evaluate", "--data", "fixtures/s0", "--scenario",
                            kData + "/fixtures/s0/scenarios/s0.json", "--context", "s0"});
  CHECK(by_name.out == r.out);
  const auto global_after = cli({"evaluate", "--data=fixtures/s0", "--carbon-price", "2604"});
  CHECK(json::parse(global_after.out)["quadrant_incentivized"]["viable"] == true);
}

TEST_CASE("cli trends on the synthetic exponentials") {
  const auto r = cli({"trends", "--data", kData + "/mlperf-like"});
  REQUIRE(r.code == 0);
  for (const auto& f : json::parse(r.out)["fits"]) {
    CHECK(f["perf"]["months"].get<double>() == Approx(12.0).epsilon(1e-9));
  }
}

TEST_CASE("cli optimize with the iso-carbon cap on X/Y") {
  const auto r = cli({"optimize", "--data", kData + "/fixtures/xy", "--cap", "iso-carbon"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["plan"]["platform_id"] == "Y");
  CHECK(j["pivot"]["usd_per_t"].get<double>() == Approx(200.0).epsilon(1e-12));
}

TEST_CASE("cli exit codes") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"levitate"}).code == 2);
  auto flag = cli({"evaluate", "--warp-speed"});
  CHECK(flag.code == 2);
  CHECK(flag.err.find("warp-speed") != std::string::npos);
  CHECK(cli({"evaluate", "--format", "yaml"}).code == 2);
  CHECK(cli({"evaluate", "--data", "/definitely/not/here"}).code == 2);
  CHECK(cli({"sweep", "--data", "reconstruction", "--carbon-price", "5"}).code == 2);
  CHECK(cli({"--help"}).code == 0);

  const auto engine = cli({"evaluate", "--data", "fixtures/s0", "--scenario", "missing"});
  CHECK(engine.code == 1);
  const auto body = json::parse(engine.out);
  CHECK(body["error"]["diagnostics"][0]["field"] == "scenario");
  CHECK(cli({"evaluate", "--data", "reconstruction"}).code == 1);
}

TEST_CASE("cli load failures report diagnostics") {
  const fs::path dir = fs::temp_directory_path() / ("dcce-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "platforms.csv") << "id,colour\nx,red\n";
  const auto r = cli({"trends", "--data", dir.string()});
  fs::remove_all(dir);
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["error"]["type"] == "load_error");
}

TEST_CASE("csv and json encode the same values") {
  const std::vector<std::vector<std::string>> commands = {
      {"evaluate", "--data", "fixtures/s0"},
      {"optimize", "--data", "fixtures/xy", "--cap", "iso-power"},
      {"sweep", "--data", "reconstruction", "--scenario", "nextgen-2027"},
      {"trends", "--data", "reconstruction"},
      {"design", "--data", "reconstruction", "--scenario", "nextgen-2027", "--context", "global-2027"},
      {"dse", "--data", "fixtures/s0", "--no-grid", "--eta", "1", "--eta", "1.5"},
      {"platforms", "--data", "reconstruction"},
  };
  for (auto args : commands) {
    CAPTURE(args[0]);
    const auto as_json = cli(args);
    REQUIRE(as_json.code == 0);
    args.insert(args.end(), {"--format", "csv"});
    const auto as_csv = cli(args);
    REQUIRE(as_csv.code == 0);

    const auto expected = dcce::cli::tabulate(args[0], json::parse(as_json.out));
    const auto decoded = dcce::cli::parse_csv(as_csv.out);
    REQUIRE(decoded.columns == expected.columns);
    REQUIRE(decoded.rows.size() == expected.rows.size());
    CHECK_FALSE(decoded.rows.empty());
    for (std::size_t i = 0; i < decoded.rows.size(); ++i) {
      for (std::size_t c = 0; c < decoded.columns.size(); ++c) {
        const auto& a = decoded.rows[i][c];
        const auto& b = expected.rows[i][c];
        // Numeric cells must decode to the identical double.
        char* end = nullptr;
        const double x = std::strtod(a.c_str(), &end);
        if (!a.empty() && end == a.c_str() + a.size()) {
          CHECK(x == std::strtod(b.c_str(), nullptr));
        } else {
          CHECK(a == b);
        }
      }
    }
  }
  CHECK(cli({"evaluate", "--data", "fixtures/s0", "--format", "table"}).out.find("required_incentive_usd_per_t") !=
        std::string::npos);
}

TEST_CASE("cli dse writes curve and grid files") {
  const fs::path dir = fs::temp_directory_path() / ("dcce-dse-" + std::to_string(::getpid()));
  const auto r = cli({"dse", "--data", "fixtures/s0", "--resolution", "6", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "curves.csv"));
  const auto grid = dcce::cli::parse_csv([&] {
    std::ifstream in(dir / "grid.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }());
  CHECK(grid.rows.size() == 36);
  std::ifstream saved(dir / "dse.json");
  std::stringstream ss;
  ss << saved.rdbuf();
  CHECK(ss.str() == r.out);
  fs::remove_all(dir);
}

TEST_CASE("http endpoints") {
  Loaded s0("fixtures/s0");
  LiveServer server(s0.ptr);
  auto c = server.client();

  auto health = c.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->body == "ok");

  auto eval = c.Post("/api/evaluate", R"({"scenario": "s0", "context": "s0"})", "application/json");
  REQUIRE(eval);
  CHECK(eval->status == 200);
  const auto body = json::parse(eval->body);
  CHECK(body["required_incentive_usd_per_t"].get<double>() == Approx(2603.9).epsilon(1e-3));
  CHECK(body["schema_version"] == "1.0");

  // Same bytes as the CLI for the same request.
  const auto from_cli = cli({"evaluate", "--data", kData + "/fixtures/s0", "--scenario", "s0", "--context", "s0"});
  CHECK(eval->body == from_cli.out);

  auto bad = c.Post("/api/evaluate", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["error"]["type"] == "bad_request");

  auto field = c.Post("/api/evaluate", R"({"overrides": {"lifetime_years": "long"}})", "application/json");
  REQUIRE(field);
  CHECK(field->status == 400);
  CHECK(json::parse(field->body)["error"]["diagnostics"][0]["field"] == "overrides.lifetime_years");

  auto ns = c.Post("/api/evaluate",
                   R"({"scenario": {"baseline": {"platform_id": "legacy", "count": 100}, "candidate_ids": ["nextgen"],
                       "lifetime_years": 4, "gross_income_usd": 2000000,
                       "workload": [{"app": "app", "synthetic": {"acceleration": 2, "efficiency": 0.5}}]}})",
                   "application/json");
  REQUIRE(ns);
  CHECK(ns->status == 200);
  CHECK(json::parse(ns->body)["required_incentive"]["kind"] == "NS");

  auto dse = c.Post("/api/dse", R"({"eta": [1, 1.5], "carbon_price_usd_per_t": 0, "grid": {"resolution": 4}})",
                    "application/json");
  REQUIRE(dse);
  CHECK(dse->status == 200);
  const auto curves = json::parse(dse->body)["curves"];
  json viable, incentivized;
  for (const auto& cv : curves) {
    if (cv["kind"] == "viable-upgrade") viable = cv["points"];
    if (cv["kind"] == "incentivized") incentivized = cv["points"];
  }
  CHECK_FALSE(viable.empty());
  CHECK(viable == incentivized);

  for (const char* path : {"/api/platforms", "/api/contexts", "/api/scenarios"}) {
    auto r = c.Get(path);
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body).contains("schema_version"));
  }
  for (const char* path : {"/api/optimize", "/api/trends", "/api/design", "/api/sweep"}) {
    auto r = c.Post(path, "", "application/json");
    REQUIRE(r);
    CAPTURE(path);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body).contains("schema_version"));
  }
  auto missing = c.Post("/api/warp", "{}", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);
}

TEST_CASE("http is stateless under concurrent requests") {
  Loaded recon("reconstruction");
  LiveServer server(recon.ptr);
  const std::string request = R"({"scenario": "nextgen-2027", "eta_target": 4.1})";
  const auto expected = server.client().Post("/api/sweep", request, "application/json")->body;
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < 8; ++i) {
    jobs.push_back(std::async(std::launch::async, [&] {
      auto c = server.client();
      auto r = c.Post("/api/sweep", request, "application/json");
      return r ? r->body : std::string();
    }));
  }
  for (auto& j : jobs) CHECK(j.get() == expected);
}

TEST_CASE("http serves static assets") {
  const fs::path dir = fs::temp_directory_path() / ("dcce-static-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "index.html") << "<!doctype html><title>explorer</title>";
  Loaded s0("fixtures/s0");
  {
    LiveServer server(s0.ptr, dir.string());
    auto r = server.client().Get("/index.html");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body.find("explorer") != std::string::npos);
    CHECK(server.client().Get("/healthz")->body == "ok");
  }
  fs::remove_all(dir);
}
