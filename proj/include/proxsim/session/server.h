#ifndef PROXSIM_SESSION_SERVER_H_
#define PROXSIM_SESSION_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "proxsim/session/session.h"

namespace proxsim {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;         // 0 picks a free port
  std::filesystem::path static_root;  // served over plain HTTP when set
  SessionConfig defaults;
  std::optional<std::filesystem::path> out_dir;  // completed session logs
};

// Websocket host for SessionHub. One io_context thread owns every session:
// socket reads are posted into the hub and a 50 ms timer drives the ticks,
// so no locking is needed. Ticks missed while the thread was busy are run
// back to back on the next wakeup.
class SessionServer {
 public:
  explicit SessionServer(ServerOptions options);  // binds immediately
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;
  void run();   // blocks until stop()
  void stop();  // safe from any thread

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace proxsim

#endif  // PROXSIM_SESSION_SERVER_H_
