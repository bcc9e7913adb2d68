#pragma once

// Live control service. The simulation runs single-threaded on its own
// thread and talks to the network layer only through queues: command lines
// in, immutable telemetry lines out.
//
// HTTP surface:
//   GET  /stream?role=controller|observer  chunked NDJSON telemetry. The
//        response headers carry X-Anguilla-Role (the role granted; a second
//        controller is demoted to observer), X-Anguilla-Token (controller
//        only) and X-Anguilla-Config-Hash.
//   POST /command  NDJSON command lines with X-Anguilla-Token; the body of
//        the reply holds one ack or error line per command, sent once the
//        command has been applied at a step boundary.
//   GET  /status   JSON summary of the session.
// Closing the controller stream pauses the simulation.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "anguilla/engine.hpp"

namespace anguilla {

struct ServiceOptions {
  /// Publish every n-th step.
  int decimation = 4;
  /// Simulated seconds per wall second; 0 runs unpaced.
  double realtime_factor = 1.0;
  bool start_paused = false;
  /// Lines buffered per subscriber before the oldest are dropped.
  std::size_t queue_limit = 4096;
  /// Served at / when non-empty.
  std::string static_dir;
};

/// Outgoing line queue for one stream client.
class Subscription {
 public:
  explicit Subscription(std::size_t limit) : limit_(limit) {}

  void push(std::string line);
  /// Waits up to `timeout` for lines; returns whatever is queued.
  std::vector<std::string> pop_all(std::chrono::milliseconds timeout);
  void close();
  bool closed() const;
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> lines_;
  std::size_t limit_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

enum class Role { kController, kObserver };

class Service {
 public:
  Service(ScenarioConfig config, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Starts the simulation thread and the HTTP listener. Port 0 picks a
  /// free port. Throws Error(kIo) if the address cannot be bound.
  int start(const std::string& host, int port);
  /// Blocks until stop() is called from another thread or a signal.
  void wait();
  void stop();
  int port() const;

  /// In-process equivalents of the HTTP endpoints.
  struct Attachment {
    Role role = Role::kObserver;
    std::string token;
    std::shared_ptr<Subscription> subscription;
  };
  Attachment attach(Role requested);
  void detach(const Attachment& attachment);

  /// Queues one command line and waits for its ack or error reply.
  nlohmann::json submit(const std::string& token, const std::string& line,
                        std::chrono::milliseconds timeout = std::chrono::seconds(10));

  nlohmann::json status() const;
  std::string config_hash() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace anguilla
