#pragma once

// Reset-query synchronization between a relying-party cache and a router.

#include "hroa/rtr_wire.hpp"
#include "hroa/workload.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hroa::rtr {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port", "[v6]:port" or ":port". Throws ParseError.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

/// Frozen cache content; shared read-only across connections.
struct CacheSnapshot {
  std::uint16_t session_id = 0;
  std::uint32_t serial = 0;
  Workload workload;
  HybridConfig config;
};

struct ServerOptions {
  Scheme scheme = Scheme::hroa;
  std::uint8_t version = kDefaultVersion;
  /// Writer rate limit in bits per second; 0 leaves the writer unshaped.
  std::uint64_t bandwidth_bps = 0;
  /// Raw bytes written right after the Cache Response (test hook).
  Bytes injected;
  unsigned jobs = 1;
  /// Called once per completed response.
  std::function<void(const std::string &)> log;
};

/// Cache server. The full response for the configured scheme is encoded and
/// serialized once at construction; every Reset Query is answered with it.
/// Connections are served concurrently, one thread each.
class Server {
public:
  /// Binds and starts listening. Throws TransportError on bind failure.
  Server(std::shared_ptr<const CacheSnapshot> snapshot, ServerOptions options,
         const Endpoint &bind = {});
  ~Server();
  Server(const Server &) = delete;
  Server &operator=(const Server &) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

  std::size_t payload_pdus() const noexcept { return payload_pdus_; }
  std::size_t payload_bytes() const noexcept { return payload_bytes_; }
  std::size_t responses_served() const noexcept { return served_.load(); }

private:
  void accept_loop();
  void serve_connection(int fd);

  std::shared_ptr<const CacheSnapshot> snapshot_;
  ServerOptions options_;
  Bytes response_;
  std::size_t payload_pdus_ = 0;
  std::size_t payload_bytes_ = 0;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> served_{0};
  std::mutex mu_;
  std::vector<std::jthread> connections_;
  std::jthread acceptor_;
};

struct SyncReport {
  std::size_t pdu_count = 0;     // payload PDUs
  std::size_t total_bytes = 0;   // payload bytes
  std::size_t wire_bytes = 0;    // every byte of the response
  std::size_t decode_count = 0;  // distinct prefixes reconstructed
  std::size_t unknown_pdus = 0;  // unsupported PDUs skipped
  std::chrono::nanoseconds elapsed{0};
  std::uint16_t session_id = 0;
  std::uint32_t serial = 0;
};

struct FetchResult {
  std::map<std::uint32_t, PrefixSet> authorizations;
  SyncReport report;
};

/// Sends a Reset Query and ingests the response through End of Data.
/// Throws TransportError, ProtocolError (bad ordering), or
/// ErrorReportReceived.
FetchResult fetch(const Endpoint &endpoint, const HybridConfig &cfg,
                  std::chrono::milliseconds timeout = std::chrono::seconds(60),
                  std::uint8_t version = kDefaultVersion);

} // namespace hroa::rtr
