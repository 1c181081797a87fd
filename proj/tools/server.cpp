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

#include "server.hpp"

#include <httplib.h>

namespace dcce::cli {

namespace {

int http_status(dcce_status status) {
  switch (status) {
    case DCCE_OK: return 200;
    case DCCE_ERR_BAD_REQUEST:
    case DCCE_ERR_INVALID_ARGUMENT: return 400;
    case DCCE_ERR_NOT_FOUND: return 404;
    case DCCE_ERR_ENGINE: return 422;
    default: return 500;
  }
}

void respond(const dcce_dataset* dataset, const char* command, const std::string& body, httplib::Response& res) {
  char* out = nullptr;
  const dcce_status status = dcce_run(dataset, command, body.c_str(), &out);
  res.status = http_status(status);
  res.set_content(out != nullptr ? out : "", "application/json");
  dcce_string_free(out);
}

}  // namespace

ApiServer::ApiServer(const dcce_dataset* dataset, std::string static_dir)
    : server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  for (const char* name : {"platforms", "contexts", "scenarios"}) {
    s.Get(std::string("/api/") + name,
          [dataset, name](const httplib::Request&, httplib::Response& res) { respond(dataset, name, "", res); });
  }
  for (const char* name : {"evaluate", "dse", "optimize", "trends", "design", "sweep"}) {
    s.Post(std::string("/api/") + name, [dataset, name](const httplib::Request& req, httplib::Response& res) {
      respond(dataset, name, req.body, res);
    });
  }
  if (!static_dir.empty()) s.set_mount_point("/", static_dir);
}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::stop() { server_->stop(); }

}  // namespace dcce::cli
