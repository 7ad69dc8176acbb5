#include "wsn/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Envelope> queue;
  bool closed = false;
};

// Shared by both backends: per-rank arrival queues. A single queue per rank
// preserves FIFO per (sender, dest) because each push happens under the lock
// in channel order.
class MailboxSet {
 public:
  explicit MailboxSet(int process_count) : boxes_(process_count) {}

  void push(Envelope env) {
    Mailbox& box = boxes_[env.dest];
    {
      std::lock_guard lock(box.mu);
      if (box.closed) return;  // late delivery after shutdown is dropped
      box.queue.push_back(std::move(env));
    }
    box.cv.notify_one();
  }

  std::optional<Envelope> pop_blocking(Rank self) {
    Mailbox& box = boxes_[self];
    std::unique_lock lock(box.mu);
    box.cv.wait(lock, [&] { return !box.queue.empty() || box.closed; });
    if (box.queue.empty()) return std::nullopt;
    Envelope env = std::move(box.queue.front());
    box.queue.pop_front();
    return env;
  }

  std::optional<Envelope> pop_nonblocking(Rank self) {
    Mailbox& box = boxes_[self];
    std::lock_guard lock(box.mu);
    if (box.queue.empty()) return std::nullopt;
    Envelope env = std::move(box.queue.front());
    box.queue.pop_front();
    return env;
  }

  void close_all() {
    for (auto& box : boxes_) {
      {
        std::lock_guard lock(box.mu);
        box.closed = true;
      }
      box.cv.notify_all();
    }
  }

  int size() const { return static_cast<int>(boxes_.size()); }

 private:
  std::deque<Mailbox> boxes_;
};

void check_envelope(const Envelope& env, const TransportConfig& config) {
  if (env.dest < 0 || env.dest >= config.process_count) {
    throw TransportError("destination rank " + std::to_string(env.dest) +
                         " outside 0.." + std::to_string(config.process_count - 1));
  }
  if (env.sender < 0 || env.sender >= config.process_count) {
    throw TransportError("sender rank " + std::to_string(env.sender) +
                         " outside 0.." + std::to_string(config.process_count - 1));
  }
  if (env.sender == env.dest) {
    throw TransportError("rank " + std::to_string(env.sender) +
                         " cannot send to itself");
  }
  if (env.ciphertext.size() != config.packsize) {
    throw TransportError("ciphertext of " + std::to_string(env.ciphertext.size()) +
                         " bytes, packsize is " + std::to_string(config.packsize));
  }
}

class MemoryTransport final : public Transport {
 public:
  explicit MemoryTransport(const TransportConfig& config)
      : config_(config), mail_(config.process_count) {}

  ~MemoryTransport() override { close(); }

  void send(const Envelope& env) override {
    check_envelope(env, config_);
    if (closed_) throw TransportError("transport is closed");
    mail_.push(env);
  }

  std::optional<Envelope> recv(Rank self) override { return mail_.pop_blocking(self); }

  std::optional<Envelope> try_recv(Rank self) override {
    return mail_.pop_nonblocking(self);
  }

  void close() override {
    closed_ = true;
    mail_.close_all();
  }

 private:
  TransportConfig config_;
  MailboxSet mail_;
  std::atomic<bool> closed_{false};
};

// ---- TCP backend -----------------------------------------------------------
//
// Every rank owns one listening endpoint on base_port + rank. Outgoing
// connections are established lazily on first send and cached per
// (sender, dest). Wire framing: u32 length (big-endian, = 4 + packsize),
// u16 sender, u16 dest, ciphertext.

bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r <= 0) return false;
    got += static_cast<std::size_t>(r);
  }
  return true;
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t n) {
  std::size_t sent = 0;
  while (sent < n) {
    const ssize_t r = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (r <= 0) return false;
    sent += static_cast<std::size_t>(r);
  }
  return true;
}

class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(const TransportConfig& config)
      : config_(config), mail_(config.process_count) {
    const long max_port =
        static_cast<long>(config.base_port) + config.process_count - 1;
    if (config.base_port == 0 || max_port > 65535) {
      throw ConfigError("tcp ports " + std::to_string(config.base_port) + ".." +
                        std::to_string(max_port) + " out of range");
    }
    listeners_.resize(config.process_count, -1);
    for (Rank r = 0; r < config.process_count; ++r) {
      listeners_[r] = open_listener(static_cast<std::uint16_t>(config.base_port + r));
    }
    for (Rank r = 0; r < config.process_count; ++r) {
      acceptors_.emplace_back([this, r] { accept_loop(listeners_[r], r); });
    }
  }

  ~TcpTransport() override { close(); }

  void send(const Envelope& env) override {
    check_envelope(env, config_);
    if (closed_) throw TransportError("transport is closed");

    Connection& conn = connection_for(env.sender, env.dest);
    std::vector<std::uint8_t> buf(8 + env.ciphertext.size());
    const std::uint32_t length = static_cast<std::uint32_t>(4 + config_.packsize);
    buf[0] = static_cast<std::uint8_t>(length >> 24);
    buf[1] = static_cast<std::uint8_t>(length >> 16);
    buf[2] = static_cast<std::uint8_t>(length >> 8);
    buf[3] = static_cast<std::uint8_t>(length);
    buf[4] = static_cast<std::uint8_t>(env.sender >> 8);
    buf[5] = static_cast<std::uint8_t>(env.sender);
    buf[6] = static_cast<std::uint8_t>(env.dest >> 8);
    buf[7] = static_cast<std::uint8_t>(env.dest);
    std::memcpy(buf.data() + 8, env.ciphertext.data(), env.ciphertext.size());

    std::lock_guard lock(conn.mu);
    if (!write_all(conn.fd, buf.data(), buf.size())) {
      throw TransportError("tcp send from rank " + std::to_string(env.sender) +
                           " to rank " + std::to_string(env.dest) + " failed");
    }
  }

  std::optional<Envelope> recv(Rank self) override { return mail_.pop_blocking(self); }

  std::optional<Envelope> try_recv(Rank self) override {
    return mail_.pop_nonblocking(self);
  }

  void close() override {
    bool expected = false;
    if (!closed_.compare_exchange_strong(expected, true)) return;
    for (const int fd : listeners_) {
      if (fd >= 0) {
        ::shutdown(fd, SHUT_RDWR);
        ::close(fd);
      }
    }
    {
      std::lock_guard lock(conn_mu_);
      for (auto& [key, conn] : connections_) {
        ::shutdown(conn->fd, SHUT_RDWR);
        ::close(conn->fd);
      }
      connections_.clear();
    }
    {
      std::lock_guard lock(reader_mu_);
      for (const int fd : reader_fds_) {
        ::shutdown(fd, SHUT_RDWR);
      }
    }
    for (auto& t : acceptors_) {
      if (t.joinable()) t.join();
    }
    for (;;) {
      std::thread t;
      {
        std::lock_guard lock(reader_mu_);
        if (readers_.empty()) break;
        t = std::move(readers_.back());
        readers_.pop_back();
      }
      if (t.joinable()) t.join();
    }
    mail_.close_all();
  }

 private:
  struct Connection {
    int fd = -1;
    std::mutex mu;
  };

  static int open_listener(std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw TransportError("bind to 127.0.0.1:" + std::to_string(port) + " failed");
    }
    if (::listen(fd, 64) != 0) {
      ::close(fd);
      throw TransportError("listen on port " + std::to_string(port) + " failed");
    }
    return fd;
  }

  void accept_loop(int listener, Rank owner) {
    for (;;) {
      const int fd = ::accept(listener, nullptr, nullptr);
      if (fd < 0) return;  // listener closed
      {
        std::lock_guard lock(reader_mu_);
        if (closed_) {
          ::close(fd);
          return;
        }
        reader_fds_.push_back(fd);
        readers_.emplace_back([this, fd, owner] { read_loop(fd, owner); });
      }
    }
  }

  void read_loop(int fd, Rank owner) {
    const std::uint32_t expect = static_cast<std::uint32_t>(4 + config_.packsize);
    std::vector<std::uint8_t> body(4 + config_.packsize);
    for (;;) {
      std::uint8_t head[4];
      if (!read_exact(fd, head, 4)) break;
      const std::uint32_t length = (static_cast<std::uint32_t>(head[0]) << 24) |
                                   (static_cast<std::uint32_t>(head[1]) << 16) |
                                   (static_cast<std::uint32_t>(head[2]) << 8) |
                                   head[3];
      if (length != expect) break;  // framing violation; drop the connection
      if (!read_exact(fd, body.data(), body.size())) break;
      Envelope env;
      env.sender = static_cast<Rank>((body[0] << 8) | body[1]);
      env.dest = static_cast<Rank>((body[2] << 8) | body[3]);
      if (env.dest != owner) break;
      env.ciphertext.assign(body.begin() + 4, body.end());
      mail_.push(std::move(env));
    }
    ::close(fd);
  }

  Connection& connection_for(Rank sender, Rank dest) {
    const auto key = std::make_pair(sender, dest);
    {
      std::lock_guard lock(conn_mu_);
      const auto it = connections_.find(key);
      if (it != connections_.end()) return *it->second;
    }
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(config_.base_port + dest));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw TransportError("connect to rank " + std::to_string(dest) + " failed");
    }
    std::lock_guard lock(conn_mu_);
    auto [it, inserted] = connections_.try_emplace(key, nullptr);
    if (!inserted) {
      ::close(fd);  // another thread won the race
      return *it->second;
    }
    it->second = std::make_unique<Connection>();
    it->second->fd = fd;
    return *it->second;
  }

  TransportConfig config_;
  MailboxSet mail_;
  std::vector<int> listeners_;
  std::vector<std::thread> acceptors_;
  std::mutex reader_mu_;
  std::vector<std::thread> readers_;
  std::vector<int> reader_fds_;
  std::mutex conn_mu_;
  std::map<std::pair<Rank, Rank>, std::unique_ptr<Connection>> connections_;
  std::atomic<bool> closed_{false};
};

}  // namespace

const char* to_string(Backend backend) {
  return backend == Backend::Memory ? "memory" : "tcp";
}

Backend parse_backend(const std::string& name) {
  if (name == "memory") return Backend::Memory;
  if (name == "tcp") return Backend::Tcp;
  throw ConfigError("unknown backend '" + name + "' (expected memory or tcp)");
}

std::unique_ptr<Transport> make_transport(const TransportConfig& config) {
  if (config.process_count < 2) {
    throw ConfigError("transport needs at least 2 ranks");
  }
  if (config.backend == Backend::Memory) {
    return std::make_unique<MemoryTransport>(config);
  }
  return std::make_unique<TcpTransport>(config);
}

}  // namespace wsn
