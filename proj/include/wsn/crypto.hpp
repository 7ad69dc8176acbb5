#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "wsn/aes.hpp"
#include "wsn/topology.hpp"
#include "wsn/wire.hpp"

namespace wsn {

struct CipherConfig {
  AesKey192 key{};
  Block16 iv{};                  // initial counter block
  std::uint32_t rounds = 1000;   // keystream passes per chunk
  static constexpr std::size_t kChunkSize = 16;
};

struct Serial {
  bool operator==(const Serial&) const = default;
};
struct Static {
  unsigned workers = 1;
  bool operator==(const Static&) const = default;
};
struct Dynamic {
  unsigned workers = 1;
  bool operator==(const Dynamic&) const = default;
};

// How the per-chunk work of one xcrypt call is distributed.
using SchedulingMode = std::variant<Serial, Static, Dynamic>;

std::string to_string(const SchedulingMode& mode);

/// Parses "serial", "static" or "dynamic"; parallel modes take `workers`.
SchedulingMode parse_scheduling_mode(const std::string& name, unsigned workers);

enum class CryptoOp { Encrypt, Decrypt };

const char* to_string(CryptoOp op);

struct TimingSample {
  Rank rank = 0;
  std::uint32_t iteration = 0;
  CryptoOp op = CryptoOp::Encrypt;
  double seconds = 0.0;
};

/// iv as a big-endian 128-bit integer plus `index`, modulo 2^128.
Block16 counter_block(const Block16& iv, std::uint64_t index);

struct XcryptStats {
  std::uint64_t block_cipher_calls = 0;
};

/// CTR transform of a whole frame in place, chunked into 16-byte blocks.
/// Chunk c is XORed with the accumulated keystream over counter indices
/// r*C + c for r in [0, rounds); the chunk loop is the scheduled unit of
/// work. Output bytes are identical across modes; the transform is its own
/// inverse. Returns the wall duration of the whole call in seconds.
double xcrypt(Frame& frame, const CipherConfig& config, const SchedulingMode& mode,
              XcryptStats* stats = nullptr);

/// Startup self-check: true iff some chunk keystream is nonzero, i.e. the
/// configured transform is not the identity.
bool keystream_nonzero(const CipherConfig& config, std::size_t chunks);

}  // namespace wsn
