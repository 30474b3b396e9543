// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "pdm/scene.h"
#include "pdm/service/session.h"

namespace pdm::service {

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path ui_dir;  // serves index.html from here when set
  int io_threads = 2;
  int tick_ms = 15;
  SessionOptions session;
  RenderSettings render;
};

/// HTTP + WebSocket front end. GET / serves the UI, GET /scene the scene JSON,
/// and a WebSocket upgrade on any path opens one EditSession for that connection.
class Server {
 public:
  Server(Scene scene, SceneDescription description, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the io threads. Returns the bound port.
  unsigned short start();
  void stop();
  /// Blocks until stop() is called from another thread or a signal arrives.
  void wait();

  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pdm::service
