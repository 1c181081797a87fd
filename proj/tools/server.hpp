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

#include <memory>
#include <string>

#include "dcce/dcce.h"

namespace httplib {
class Server;
}

namespace dcce::cli {

// HTTP front end over a loaded dataset. The dataset must outlive the server.
class ApiServer {
 public:
  ApiServer(const dcce_dataset* dataset, std::string static_dir = {});
  ~ApiServer();

  // Binds to host:port; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  bool listen();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace dcce::cli
