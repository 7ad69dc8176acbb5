#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wsn/topology.hpp"

namespace wsn {

enum class Backend { Memory, Tcp };

const char* to_string(Backend backend);
Backend parse_backend(const std::string& name);

// Sender and destination travel in the clear; the payload stays opaque.
struct Envelope {
  Rank sender = 0;
  Rank dest = 0;
  std::vector<std::uint8_t> ciphertext;
};

struct TransportConfig {
  Backend backend = Backend::Memory;
  int process_count = 0;  // ranks 0..process_count-1
  std::size_t packsize = 256;
  std::uint16_t base_port = 0;  // Tcp: rank r listens on base_port + r
};

// Reliable FIFO-per-channel delivery between ranks. send never waits for the
// receiver; recv blocks until an envelope for `self` arrives or the backend
// closes.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual void send(const Envelope& env) = 0;

  /// Blocks; nullopt only after close() with the queue drained.
  virtual std::optional<Envelope> recv(Rank self) = 0;

  /// Non-blocking; nullopt when nothing is pending.
  virtual std::optional<Envelope> try_recv(Rank self) = 0;

  virtual void close() = 0;
};

std::unique_ptr<Transport> make_transport(const TransportConfig& config);

}  // namespace wsn
