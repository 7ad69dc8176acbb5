#include "wsn/wire.hpp"

#include <bit>
#include <cstring>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

// Fixed field offsets and widths of the frame layout.
constexpr std::size_t kInitIpOffset = 1;
constexpr std::size_t kInitIpWidth = 15;
constexpr std::size_t kInitMacOffset = 17;
constexpr std::size_t kInitMacWidth = 17;

constexpr std::size_t kValueOffset = 1;
constexpr std::size_t kIterationOffset = 5;

constexpr std::size_t kEventMatchedOffset = 5;
constexpr std::size_t kEventDetectOffset = 37;
constexpr std::size_t kEventTimestampOffset = 45;
constexpr std::size_t kEventTimestampWidth = 23;

void put_u32le(Frame& f, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) f[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32le(const Frame& f, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(f[at + i]) << (8 * i);
  return v;
}

void put_u64le(Frame& f, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) f[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_u64le(const Frame& f, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(f[at + i]) << (8 * i);
  return v;
}

// One length byte, then raw bytes, zero fill to the fixed field width.
void put_text(Frame& f, std::size_t at, std::size_t width, const std::string& s,
              const char* what) {
  if (s.size() > width) {
    throw EncodingError(std::string(what) + " text of " + std::to_string(s.size()) +
                        " bytes exceeds its " + std::to_string(width) + "-byte field");
  }
  f[at] = static_cast<std::uint8_t>(s.size());
  std::memcpy(f.data() + at + 1, s.data(), s.size());
}

std::string get_text(const Frame& f, std::size_t at, std::size_t width,
                     const char* what) {
  const std::size_t len = f[at];
  if (len > width) {
    throw ProtocolError(std::string(what) + " length byte " + std::to_string(len) +
                        " exceeds its " + std::to_string(width) + "-byte field");
  }
  return std::string(reinterpret_cast<const char*>(f.data()) + at + 1, len);
}

void check_room(const Frame& f, std::size_t need, const char* what) {
  if (f.size() < need) {
    throw ProtocolError(std::string("frame of ") + std::to_string(f.size()) +
                        " bytes too short for " + what);
  }
}

}  // namespace

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Init: return "init";
    case MessageKind::NeighborValue: return "neighbor-value";
    case MessageKind::Event: return "event";
    case MessageKind::Terminate: return "terminate";
    case MessageKind::Stop: return "stop";
  }
  return "unknown";
}

MessageKind kind_of(const Payload& payload) {
  return static_cast<MessageKind>(payload.index());
}

bool valid_packsize(std::size_t packsize) {
  return packsize >= kMinPacksize && packsize % 16 == 0;
}

std::size_t encoded_size(const Payload& payload) {
  switch (kind_of(payload)) {
    case MessageKind::Init: return kInitMacOffset + 1 + kInitMacWidth;     // 35
    case MessageKind::NeighborValue: return kIterationOffset + 4;         // 9
    case MessageKind::Event: return kEventTimestampOffset + 1 + kEventTimestampWidth;  // 69
    case MessageKind::Terminate: return kValueOffset + 4;                 // 5
    case MessageKind::Stop: return 1;
  }
  return 0;
}

Frame encode(const Payload& payload, std::size_t packsize) {
  if (!valid_packsize(packsize)) {
    throw DomainError("packsize " + std::to_string(packsize) +
                      " is not >= 64 and a multiple of 16");
  }
  if (encoded_size(payload) > packsize) {
    throw EncodingError(std::string(to_string(kind_of(payload))) + " payload needs " +
                        std::to_string(encoded_size(payload)) +
                        " bytes, packsize is " + std::to_string(packsize));
  }
  Frame f(packsize, 0);
  f[0] = static_cast<std::uint8_t>(kind_of(payload));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, InitPayload>) {
          put_text(f, kInitIpOffset, kInitIpWidth, p.ip, "ip");
          put_text(f, kInitMacOffset, kInitMacWidth, p.mac, "mac");
        } else if constexpr (std::is_same_v<T, NeighborValuePayload>) {
          put_u32le(f, kValueOffset, p.value);
          put_u32le(f, kIterationOffset, p.iteration);
        } else if constexpr (std::is_same_v<T, EventPayload>) {
          put_u32le(f, kValueOffset, p.value);
          for (int i = 0; i < 4; ++i) {
            put_u64le(f, kEventMatchedOffset + 8 * i,
                      std::bit_cast<std::uint64_t>(p.matched_iterations[i]));
          }
          put_u64le(f, kEventDetectOffset, std::bit_cast<std::uint64_t>(p.detect_time));
          put_text(f, kEventTimestampOffset, kEventTimestampWidth, p.timestamp,
                   "timestamp");
        } else if constexpr (std::is_same_v<T, TerminatePayload>) {
          put_u32le(f, kValueOffset, p.final_iteration);
        } else {
          static_assert(std::is_same_v<T, StopPayload>);
        }
      },
      payload);
  return f;
}

Payload decode(const Frame& frame) {
  check_room(frame, 1, "a tag byte");
  const std::uint8_t tag = frame[0];
  switch (tag) {
    case 0: {
      check_room(frame, kInitMacOffset + 1 + kInitMacWidth, "an init payload");
      InitPayload p;
      p.ip = get_text(frame, kInitIpOffset, kInitIpWidth, "ip");
      p.mac = get_text(frame, kInitMacOffset, kInitMacWidth, "mac");
      return p;
    }
    case 1: {
      check_room(frame, kIterationOffset + 4, "a neighbor-value payload");
      NeighborValuePayload p;
      p.value = get_u32le(frame, kValueOffset);
      p.iteration = get_u32le(frame, kIterationOffset);
      return p;
    }
    case 2: {
      check_room(frame, kEventTimestampOffset + 1 + kEventTimestampWidth,
                 "an event payload");
      EventPayload p;
      p.value = get_u32le(frame, kValueOffset);
      for (int i = 0; i < 4; ++i) {
        p.matched_iterations[i] =
            std::bit_cast<std::int64_t>(get_u64le(frame, kEventMatchedOffset + 8 * i));
      }
      p.detect_time = std::bit_cast<double>(get_u64le(frame, kEventDetectOffset));
      p.timestamp = get_text(frame, kEventTimestampOffset, kEventTimestampWidth,
                             "timestamp");
      return p;
    }
    case 3: {
      check_room(frame, kValueOffset + 4, "a terminate payload");
      TerminatePayload p;
      p.final_iteration = get_u32le(frame, kValueOffset);
      return p;
    }
    case 4:
      return StopPayload{};
    default:
      throw ProtocolError("unknown frame tag " + std::to_string(tag));
  }
}

}  // namespace wsn
