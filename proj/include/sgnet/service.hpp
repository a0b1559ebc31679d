// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
//
// Stateless HTTP front end over a loaded checkpoint, and the command-line
// entry point.
#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgnet/model.hpp"

namespace sgnet {

inline constexpr const char* kCheckpointEnv = "SGNET_CHECKPOINT";

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

struct ServiceOptions {
  int grid_threads = 1;
};

/// Every handler reads the model through a const reference; scenes travel
/// in request bodies, so requests never share state.
class Service {
 public:
  explicit Service(Model model, std::string checkpoint_path = {}, ServiceOptions options = {});

  /// Routes a request the way the HTTP server does. Unknown paths give 404,
  /// a known path with the wrong method 405.
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

  HttpResponse health() const;
  HttpResponse predict(const std::string& body) const;
  HttpResponse synthesize_step(const std::string& body) const;
  HttpResponse heatmap(const std::string& body) const;

  const Model& model() const noexcept { return model_; }
  std::uint64_t request_count() const noexcept { return requests_.load(); }

 private:
  const Model model_;
  const std::string checkpoint_path_;
  const ServiceOptions options_;
  mutable std::atomic<std::uint64_t> requests_{0};
  mutable std::atomic<std::uint64_t> failures_{0};
};

/// Blocks serving on host:port. `port` 0 picks a free port; `on_listen`
/// receives the bound port once the socket is listening, plus a stop
/// callback.
void serve(const Service& service, const std::string& host, int port,
           const std::function<void(int port, std::function<void()> stop)>& on_listen = {});

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgnet
