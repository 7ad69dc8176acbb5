#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace wsn {

// Tag byte 0..4, first byte of every plaintext frame.
enum class MessageKind : std::uint8_t {
  Init = 0,
  NeighborValue = 1,
  Event = 2,
  Terminate = 3,
  Stop = 4,
};

const char* to_string(MessageKind kind);

struct InitPayload {
  std::string ip;   // dotted quad, <= 15 chars
  std::string mac;  // colon-separated hex, 17 chars

  bool operator==(const InitPayload&) const = default;
};

struct NeighborValuePayload {
  std::uint32_t value = 0;
  std::uint32_t iteration = 0;  // 1-based

  bool operator==(const NeighborValuePayload&) const = default;
};

struct EventPayload {
  std::uint32_t value = 0;
  // (left, right, top, bottom); -1 = no match or absent neighbor.
  std::array<std::int64_t, 4> matched_iterations{-1, -1, -1, -1};
  double detect_time = 0.0;  // simulation clock seconds at detection
  std::string timestamp;     // exactly 23 chars, "YYYY-MM-DD HH:MM:SS.mmm"

  bool operator==(const EventPayload&) const = default;
};

struct TerminatePayload {
  std::uint32_t final_iteration = 0;

  bool operator==(const TerminatePayload&) const = default;
};

struct StopPayload {
  bool operator==(const StopPayload&) const = default;
};

// Variant index equals the wire tag byte.
using Payload = std::variant<InitPayload, NeighborValuePayload, EventPayload,
                             TerminatePayload, StopPayload>;

MessageKind kind_of(const Payload& payload);

// Fixed-size plaintext or ciphertext buffer of packsize bytes.
using Frame = std::vector<std::uint8_t>;

inline constexpr std::size_t kMinPacksize = 64;
inline constexpr std::size_t kDefaultPacksize = 256;

// packsize must be >= 64 and a multiple of the 16-byte cipher chunk.
bool valid_packsize(std::size_t packsize);

/// Bytes the encoded form of `payload` occupies, tag byte included.
std::size_t encoded_size(const Payload& payload);

/// Byte-exact fixed-offset encoding, zero padded to packsize.
/// Integers little-endian, doubles as little-endian IEEE-754 bits, texts as
/// one length byte plus raw bytes in a fixed-width field.
/// Throws EncodingError when the payload does not fit.
Frame encode(const Payload& payload, std::size_t packsize);

/// Inverse of encode on the encoded region; trailing padding is ignored.
/// Throws ProtocolError on unknown tag bytes or malformed text lengths.
Payload decode(const Frame& frame);

}  // namespace wsn
