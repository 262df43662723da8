#pragma once

// HTTP+JSON binding of the experiment service.
//
//   POST /sessions
//   GET  /sessions/{id}
//   GET  /sessions/{id}/next-task
//   POST /sessions/{id}/tasks/{topic}/stance       {"stance": -2..2}
//   GET  /sessions/{id}/tasks/{topic}/ranking      503 + Retry-After when every run is locked
//   POST /sessions/{id}/tasks/{topic}/click        {"item_id": "..."}
//   POST /sessions/{id}/tasks/{topic}/engagement   {"choice": "like", "read_more"?, "perceived_stance"?}
//   GET  /runs
//   GET  /runs/{id}/metrics
//   GET  /config/topics
//
// Errors are {"error": kind, "message": text} with 400 (validation), 404,
// 409 (out-of-order step), 503 (unavailable) or 500.

#include <memory>
#include <string>

#include "ranklab/service.hpp"

namespace ranklab::service {

class HttpServer {
 public:
  explicit HttpServer(ExperimentService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to `port`, or to a free port when port is 0. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ranklab::service
