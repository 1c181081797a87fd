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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ingest.hpp"

namespace dcce {

inline constexpr std::string_view kSchemaVersion = "1.0";

struct FieldError {
  std::string field;  // dotted path into the request, empty for the whole body
  std::string message;
};

// Request body that does not match the command's schema.
class RequestError : public std::invalid_argument {
 public:
  explicit RequestError(std::vector<FieldError> errors);
  RequestError(std::string field, std::string message);

  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

// JSON request/response layer shared by the CLI, the HTTP service and the C
// API. Holds an immutable dataset; run() is const and safe to call
// concurrently.
class Service {
 public:
  explicit Service(Dataset dataset);

  nlohmann::ordered_json run(std::string_view command, const nlohmann::ordered_json& request) const;

  const Dataset& dataset() const { return dataset_; }

  static const std::vector<std::string>& commands();

 private:
  nlohmann::ordered_json evaluate(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json dse(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json optimize(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json trends(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json design(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json sweep(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json platforms(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json contexts(const nlohmann::ordered_json& request) const;
  nlohmann::ordered_json scenarios(const nlohmann::ordered_json& request) const;

  Dataset dataset_;
};

// Canonical serialization used for every JSON body the tools emit.
std::string render_json(const nlohmann::ordered_json& value);

// Error body for a failed request: {"schema_version", "error": {...}}.
nlohmann::ordered_json error_body(std::string_view type, std::string_view message,
                          const std::vector<FieldError>& fields = {});

}  // namespace dcce
