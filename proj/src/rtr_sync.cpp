#include "hroa/rtr_sync.hpp"

#include "hroa/error.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <sstream>

namespace hroa::rtr {
namespace {

using Clock = std::chrono::steady_clock;

class Fd {
public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd &&o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd &operator=(Fd &&o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }
  void reset() noexcept {
    if (fd_ >= 0)
      ::close(fd_);
    fd_ = -1;
  }

private:
  int fd_;
};

std::string errno_text(const char *what) { return std::string(what) + ": " + std::strerror(errno); }

struct AddrInfo {
  addrinfo *head = nullptr;
  ~AddrInfo() {
    if (head)
      freeaddrinfo(head);
  }
};

void resolve(const Endpoint &ep, bool passive, AddrInfo &out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = passive ? AI_PASSIVE : 0;
  const std::string port = std::to_string(ep.port);
  const int rc = getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints,
                             &out.head);
  if (rc != 0)
    throw TransportError("resolve " + ep.to_string() + ": " + gai_strerror(rc));
}

// Sends everything, pacing to `bps` bits per second when nonzero: each chunk
// waits until the bytes already sent fit the rate (a token bucket with a
// one-chunk burst).
bool send_all(int fd, std::span<const std::uint8_t> data, std::uint64_t bps,
              const std::atomic<bool> *stopping = nullptr) {
  constexpr std::size_t kChunk = 4096;
  const auto start = Clock::now();
  std::size_t sent = 0;
  while (sent < data.size()) {
    if (stopping && stopping->load())
      return false;
    if (bps) {
      const auto due = start + std::chrono::nanoseconds(
                                   static_cast<std::int64_t>(sent * 8.0 * 1e9 / double(bps)));
      std::this_thread::sleep_until(due);
    }
    const std::size_t n = std::min(kChunk, data.size() - sent);
    const ssize_t w = ::send(fd, data.data() + sent, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    sent += static_cast<std::size_t>(w);
  }
  return true;
}

Bytes error_report(std::uint8_t version, std::uint16_t code, std::span<const std::uint8_t> echo,
                   std::string text) {
  ErrorReport r;
  r.code = code;
  r.pdu.assign(echo.begin(), echo.begin() + std::min<std::size_t>(echo.size(), 64));
  r.text = std::move(text);
  return serialize(Pdu{version, std::move(r)});
}

} // namespace

Endpoint Endpoint::parse(std::string_view text) {
  Endpoint ep;
  std::string_view host, port;
  if (!text.empty() && text.front() == '[') {
    const auto close = text.find(']');
    if (close == std::string_view::npos || close + 1 >= text.size() || text[close + 1] != ':')
      throw ParseError("bad endpoint '" + std::string(text) + "'");
    host = text.substr(1, close - 1);
    port = text.substr(close + 2);
  } else {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
      throw ParseError("endpoint needs host:port, got '" + std::string(text) + "'");
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  if (!host.empty())
    ep.host = std::string(host);
  auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
  if (ec != std::errc{} || end != port.data() + port.size() || port.empty())
    throw ParseError("bad port in endpoint '" + std::string(text) + "'");
  return ep;
}

std::string Endpoint::to_string() const {
  if (host.find(':') != std::string::npos)
    return "[" + host + "]:" + std::to_string(port);
  return host + ":" + std::to_string(port);
}

Server::Server(std::shared_ptr<const CacheSnapshot> snapshot, ServerOptions options,
               const Endpoint &bind)
    : snapshot_(std::move(snapshot)), options_(std::move(options)) {
  auto encoded = encode_workload(snapshot_->workload, options_.scheme, snapshot_->config,
                                 options_.jobs, options_.version);
  payload_pdus_ = encoded.pdus.size();
  payload_bytes_ = encoded.total_bytes;
  serialize(Pdu{options_.version, CacheResponse{snapshot_->session_id}}, response_);
  response_.insert(response_.end(), options_.injected.begin(), options_.injected.end());
  for (const auto &pdu : encoded.pdus)
    serialize(pdu, response_);
  serialize(Pdu{options_.version, EndOfData{snapshot_->session_id, snapshot_->serial}}, response_);

  AddrInfo ai;
  resolve(bind, true, ai);
  std::string last_error = "no address";
  for (addrinfo *a = ai.head; a; a = a->ai_next) {
    Fd fd(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (fd.get() < 0) {
      last_error = errno_text("socket");
      continue;
    }
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd.get(), a->ai_addr, a->ai_addrlen) != 0 || ::listen(fd.get(), 128) != 0) {
      last_error = errno_text("bind");
      continue;
    }
    sockaddr_storage ss{};
    socklen_t len = sizeof ss;
    ::getsockname(fd.get(), reinterpret_cast<sockaddr *>(&ss), &len);
    port_ = ntohs(ss.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6 *>(&ss)->sin6_port
                                           : reinterpret_cast<sockaddr_in *>(&ss)->sin_port);
    listen_fd_ = fd.release();
    break;
  }
  if (listen_fd_ < 0)
    throw TransportError("cannot listen on " + bind.to_string() + ": " + last_error);
  acceptor_ = std::jthread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

void Server::stop() {
  if (stopping_.exchange(true))
    return;
  if (acceptor_.joinable())
    acceptor_.join();
  std::vector<std::jthread> conns;
  {
    std::lock_guard lock(mu_);
    conns.swap(connections_);
  }
  conns.clear(); // joins
  if (listen_fd_ >= 0)
    ::close(listen_fd_);
  listen_fd_ = -1;
}

void Server::accept_loop() {
  while (!stopping_.load()) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 50);
    if (rc <= 0)
      continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0)
      continue;
    std::lock_guard lock(mu_);
    connections_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void Server::serve_connection(int raw_fd) {
  Fd fd(raw_fd);
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  Reassembler in;
  std::uint8_t buf[4096];
  Bytes seen;
  while (!stopping_.load()) {
    pollfd p{fd.get(), POLLIN, 0};
    const int rc = ::poll(&p, 1, 50);
    if (rc == 0)
      continue;
    if (rc < 0 && errno == EINTR)
      continue;
    if (rc < 0)
      return;
    const ssize_t n = ::recv(fd.get(), buf, sizeof buf, 0);
    if (n <= 0)
      return;
    in.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
    seen.assign(buf, buf + n);
    while (true) {
      std::optional<Pdu> pdu;
      try {
        pdu = in.next();
      } catch (const WireError &e) {
        auto report = error_report(options_.version, kCorruptData, seen, e.what());
        send_all(fd.get(), report, 0);
        return;
      }
      if (!pdu)
        break;
      if (!std::holds_alternative<ResetQuery>(pdu->body)) {
        const Bytes echo = serialize(*pdu);
        auto report = error_report(options_.version, kUnsupportedPduType, echo,
                                   "only reset queries are served");
        send_all(fd.get(), report, 0);
        return;
      }
      const auto t0 = Clock::now();
      if (!send_all(fd.get(), response_, options_.bandwidth_bps, &stopping_))
        return;
      ++served_;
      if (options_.log) {
        const auto us =
            std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0).count();
        std::ostringstream line;
        line << "scheme=" << to_string(options_.scheme) << " pdus=" << payload_pdus_
             << " bytes=" << response_.size() << " micros=" << us;
        options_.log(line.str());
      }
    }
  }
}

FetchResult fetch(const Endpoint &endpoint, const HybridConfig &cfg,
                  std::chrono::milliseconds timeout, std::uint8_t version) {
  AddrInfo ai;
  resolve(endpoint, false, ai);
  Fd fd;
  std::string last_error = "no address";
  for (addrinfo *a = ai.head; a; a = a->ai_next) {
    Fd s(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (s.get() < 0)
      continue;
    if (::connect(s.get(), a->ai_addr, a->ai_addrlen) == 0) {
      fd = std::move(s);
      break;
    }
    last_error = errno_text("connect");
  }
  if (fd.get() < 0)
    throw TransportError("cannot connect to " + endpoint.to_string() + ": " + last_error);
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

  FetchResult result;
  SyncReport &rep = result.report;
  std::map<std::uint32_t, std::vector<Prefix>> acc;
  enum class State { awaiting_response, payload, done } state = State::awaiting_response;

  const auto t0 = Clock::now();
  const auto deadline = t0 + timeout;
  const Bytes query = serialize(Pdu{version, ResetQuery{}});
  if (!send_all(fd.get(), query, 0))
    throw TransportError(errno_text("send"));

  Reassembler in;
  std::vector<std::uint8_t> buf(1 << 16);
  while (state != State::done) {
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0)
      throw TransportError("timed out waiting for End of Data");
    pollfd p{fd.get(), POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(left));
    if (rc < 0 && errno == EINTR)
      continue;
    if (rc < 0)
      throw TransportError(errno_text("poll"));
    if (rc == 0)
      continue;
    const ssize_t n = ::recv(fd.get(), buf.data(), buf.size(), 0);
    if (n < 0 && errno == EINTR)
      continue;
    if (n < 0)
      throw TransportError(errno_text("recv"));
    if (n == 0)
      throw TransportError("connection closed before End of Data");
    rep.wire_bytes += static_cast<std::size_t>(n);
    in.feed(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));

    while (state != State::done) {
      std::optional<Pdu> pdu;
      try {
        pdu = in.next();
      } catch (const WireError &e) {
        throw ProtocolError(std::string("malformed response: ") + e.what());
      }
      if (!pdu)
        break;
      if (auto *err = std::get_if<ErrorReport>(&pdu->body))
        throw ErrorReportReceived(err->code, err->text);
      if (state == State::awaiting_response) {
        auto *cr = std::get_if<CacheResponse>(&pdu->body);
        if (!cr)
          throw ProtocolError("expected Cache Response, got PDU type " +
                              std::to_string(pdu->type()));
        rep.session_id = cr->session_id;
        state = State::payload;
        continue;
      }
      if (auto *eod = std::get_if<EndOfData>(&pdu->body)) {
        if (eod->session_id != rep.session_id)
          throw ProtocolError("End of Data session id differs from Cache Response");
        rep.serial = eod->serial;
        rep.elapsed = Clock::now() - t0;
        state = State::done;
        break;
      }
      if (std::holds_alternative<CacheResponse>(pdu->body))
        throw ProtocolError("second Cache Response inside one response");
      switch (decode_payload_pdu(*pdu, cfg, acc)) {
      case PduKind::payload:
      case PduKind::withdrawal:
        ++rep.pdu_count;
        rep.total_bytes += payload_size(*pdu);
        break;
      case PduKind::unsupported:
        ++rep.unknown_pdus;
        break;
      case PduKind::other:
        throw ProtocolError("unexpected PDU type " + std::to_string(pdu->type()) +
                            " inside a cache response");
      }
    }
  }
  if (in.buffered())
    throw ProtocolError("trailing bytes after End of Data");

  for (auto &[asn, v] : acc) {
    PrefixSet s(v.begin(), v.end());
    rep.decode_count += s.size();
    result.authorizations.emplace(asn, std::move(s));
  }
  return result;
}

} // namespace hroa::rtr
