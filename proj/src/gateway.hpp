// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "scenario.hpp"
#include "simulation.hpp"

namespace inpipe {

inline constexpr int kGatewaySchemaVersion = 1;

struct GatewayOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  /// Simulated seconds per wall second; 0 runs unpaced.
  double speed = 0.0;
  double replay_window_s = 60.0;
};

/// Wire messages, shared by the service and its tests.
nlohmann::json telemetry_message(const TelemetryRow& row);
nlohmann::json hello_message(const geometry::PipeNetwork& net,
                             std::string_view role);
nlohmann::json error_message(std::string_view error);

/// Parses a client command into an action. Returns an error string instead
/// when the message is malformed; control-plane verbs (claim, release,
/// replay) are reported through `verb` with no action.
struct ClientRequest {
  std::string verb;
  std::optional<Action> action;
  double replay_seconds = 60.0;
  std::string error;
};
ClientRequest parse_client_message(std::string_view text);

/// WebSocket service exposing a live simulation. One newline-terminated JSON
/// document per WebSocket text frame in each direction. The constructor binds
/// the port; run() blocks until stop() is called.
class Gateway {
 public:
  Gateway(Scenario scenario, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  unsigned short port() const;
  void run();
  /// Async-signal-safe: only sets a flag polled by run().
  void stop();

  /// Valid after run() returns.
  const Simulation& simulation() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace inpipe
