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

/* C interface to the dcce engine.
 *
 * A dataset handle is loaded once and is immutable afterwards; it may be
 * shared across threads. Requests and responses are UTF-8 JSON documents.
 * Strings returned through out-parameters are owned by the caller and must be
 * released with dcce_string_free. dcce_last_error() is per thread. */

#ifndef DCCE_DCCE_H_
#define DCCE_DCCE_H_

#include <stddef.h>

#if defined(_WIN32)
#define DCCE_API __declspec(dllexport)
#else
#define DCCE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dcce_dataset dcce_dataset;

typedef enum dcce_status {
  DCCE_OK = 0,
  DCCE_ERR_INVALID_ARGUMENT = 1, /* null pointer or malformed argument */
  DCCE_ERR_LOAD = 2,             /* dataset failed to load; see the diagnostics */
  DCCE_ERR_IO = 3,
  DCCE_ERR_BAD_REQUEST = 4,      /* request JSON malformed or failed schema checks */
  DCCE_ERR_NOT_FOUND = 5,        /* unknown command, scenario, platform or context */
  DCCE_ERR_ENGINE = 6,           /* the model rejected the inputs */
  DCCE_ERR_INTERNAL = 7
} dcce_status;

DCCE_API const char* dcce_version(void);
DCCE_API const char* dcce_status_string(dcce_status status);

/* Message for the most recent failure on the calling thread, or "". */
DCCE_API const char* dcce_last_error(void);

/* Loads a dataset directory. With lax != 0 unknown fields are warnings.
 * On DCCE_ERR_LOAD, *diagnostics (if non-null) receives a JSON error body
 * listing every problem with path, row and column. */
DCCE_API dcce_status dcce_dataset_load(const char* root, int lax, dcce_dataset** out, char** diagnostics);
DCCE_API dcce_status dcce_dataset_save(const dcce_dataset* dataset, const char* root);
DCCE_API void dcce_dataset_free(dcce_dataset* dataset);

/* Runs a command (evaluate, dse, optimize, trends, design, sweep, platforms,
 * contexts, scenarios) on a JSON request. An empty or null request means {}.
 * *response always receives a JSON body: the result on DCCE_OK, otherwise
 * an error body with field-level diagnostics. */
DCCE_API dcce_status dcce_run(const dcce_dataset* dataset, const char* command, const char* request,
                              char** response);

DCCE_API void dcce_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* DCCE_DCCE_H_ */
