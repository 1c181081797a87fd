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

#include "dcce/dcce.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "ingest.hpp"
#include "service.hpp"

struct dcce_dataset {
  explicit dcce_dataset(dcce::Dataset d) : service(std::move(d)) {}
  dcce::Service service;
};

namespace {

using json = nlohmann::ordered_json;

thread_local std::string last_error;

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

dcce_status fail(dcce_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Fills *response with an error body and records the message.
dcce_status fail_with_body(char** response, dcce_status status, std::string_view type, const std::string& message,
                           const std::vector<dcce::FieldError>& fields = {}) {
  if (response != nullptr) *response = duplicate(dcce::render_json(dcce::error_body(type, message, fields)));
  return fail(status, message);
}

}  // namespace

extern "C" {

const char* dcce_version(void) { return DCCE_VERSION; }

const char* dcce_status_string(dcce_status status) {
  switch (status) {
    case DCCE_OK: return "ok";
    case DCCE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DCCE_ERR_LOAD: return "dataset failed to load";
    case DCCE_ERR_IO: return "i/o error";
    case DCCE_ERR_BAD_REQUEST: return "bad request";
    case DCCE_ERR_NOT_FOUND: return "not found";
    case DCCE_ERR_ENGINE: return "engine error";
    case DCCE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dcce_last_error(void) { return last_error.c_str(); }

dcce_status dcce_dataset_load(const char* root, int lax, dcce_dataset** out, char** diagnostics) {
  last_error.clear();
  if (diagnostics != nullptr) *diagnostics = nullptr;
  if (root == nullptr || out == nullptr) return fail(DCCE_ERR_INVALID_ARGUMENT, "root and out must not be null");
  *out = nullptr;
  try {
    auto result = dcce::try_load_dataset(root, dcce::LoadOptions{lax != 0});
    if (!result.dataset) {
      std::vector<dcce::FieldError> fields;
      for (const auto& e : result.diagnostics.errors) fields.push_back({e.path, e.to_string()});
      const std::string message = result.diagnostics.errors.empty() ? "dataset failed to load"
                                                                    : result.diagnostics.errors.front().to_string();
      return fail_with_body(diagnostics, DCCE_ERR_LOAD, "load_error", message, fields);
    }
    *out = new dcce_dataset(std::move(*result.dataset));
    return DCCE_OK;
  } catch (const std::bad_alloc&) {
    return fail(DCCE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with_body(diagnostics, DCCE_ERR_IO, "io_error", e.what());
  }
}

dcce_status dcce_dataset_save(const dcce_dataset* dataset, const char* root) {
  last_error.clear();
  if (dataset == nullptr || root == nullptr) return fail(DCCE_ERR_INVALID_ARGUMENT, "dataset and root must not be null");
  try {
    dcce::save_dataset(dataset->service.dataset(), root);
    return DCCE_OK;
  } catch (const std::exception& e) {
    return fail(DCCE_ERR_IO, e.what());
  }
}

void dcce_dataset_free(dcce_dataset* dataset) { delete dataset; }

dcce_status dcce_run(const dcce_dataset* dataset, const char* command, const char* request, char** response) {
  last_error.clear();
  if (response == nullptr) return fail(DCCE_ERR_INVALID_ARGUMENT, "response must not be null");
  *response = nullptr;
  if (dataset == nullptr || command == nullptr) {
    return fail_with_body(response, DCCE_ERR_INVALID_ARGUMENT, "invalid_argument", "dataset and command must not be null");
  }

  json body = json::object();
  if (request != nullptr && *request != '\0') {
    try {
      body = json::parse(request);
    } catch (const json::parse_error& e) {
      return fail_with_body(response, DCCE_ERR_BAD_REQUEST, "bad_request", "malformed JSON", {{"", e.what()}});
    }
  }

  try {
    *response = duplicate(dcce::render_json(dataset->service.run(command, body)));
    if (*response == nullptr) return fail(DCCE_ERR_INTERNAL, "out of memory");
    return DCCE_OK;
  } catch (const dcce::RequestError& e) {
    return fail_with_body(response, DCCE_ERR_BAD_REQUEST, "bad_request", e.what(), e.errors());
  } catch (const dcce::NotFound& e) {
    return fail_with_body(response, DCCE_ERR_NOT_FOUND, "not_found", e.what());
  } catch (const dcce::InvalidInput& e) {
    return fail_with_body(response, DCCE_ERR_ENGINE, "invalid_input", e.what());
  } catch (const dcce::InsufficientData& e) {
    return fail_with_body(response, DCCE_ERR_ENGINE, "insufficient_data", e.what());
  } catch (const json::exception& e) {
    return fail_with_body(response, DCCE_ERR_BAD_REQUEST, "bad_request", e.what());
  } catch (const std::exception& e) {
    return fail_with_body(response, DCCE_ERR_INTERNAL, "internal", e.what());
  }
}

void dcce_string_free(char* text) { std::free(text); }

}  // extern "C"
