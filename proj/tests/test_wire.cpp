#include <random>

#include "doctest.h"
#include "wsn/errors.hpp"
#include "wsn/wire.hpp"

using namespace wsn;

namespace {

std::string random_timestamp(std::mt19937_64& rng) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04u-%02u-%02u %02u:%02u:%02u.%03u",
                2000 + unsigned(rng() % 100), 1 + unsigned(rng() % 12),
                1 + unsigned(rng() % 28), unsigned(rng() % 24), unsigned(rng() % 60),
                unsigned(rng() % 60), unsigned(rng() % 1000));
  return buf;
}

Payload random_payload(std::mt19937_64& rng) {
  switch (rng() % 5) {
    case 0: {
      InitPayload p;
      p.ip = std::to_string(rng() % 256) + "." + std::to_string(rng() % 256) + "." +
             std::to_string(rng() % 256) + "." + std::to_string(rng() % 256);
      char mac[18];
      std::snprintf(mac, sizeof(mac), "%02x:%02x:%02x:%02x:%02x:%02x",
                    unsigned(rng() % 256), unsigned(rng() % 256), unsigned(rng() % 256),
                    unsigned(rng() % 256), unsigned(rng() % 256), unsigned(rng() % 256));
      p.mac = mac;
      return p;
    }
    case 1:
      return NeighborValuePayload{static_cast<std::uint32_t>(rng()),
                                  static_cast<std::uint32_t>(rng())};
    case 2: {
      EventPayload p;
      p.value = static_cast<std::uint32_t>(rng());
      const auto t = static_cast<std::int64_t>(rng() % 1000000 + 2);
      for (int s = 0; s < 4; ++s) {
        const auto pick = rng() % 3;
        p.matched_iterations[s] = pick == 0 ? -1 : (pick == 1 ? t : t - 1);
      }
      p.detect_time = static_cast<double>(rng() % 1000000) / 997.0;
      p.timestamp = random_timestamp(rng);
      return p;
    }
    case 3:
      return TerminatePayload{static_cast<std::uint32_t>(rng())};
    default:
      return StopPayload{};
  }
}

}  // namespace

TEST_SUITE("wire") {
  TEST_CASE("stop frame is tag byte plus zeros") {
    const Frame f = encode(StopPayload{}, 256);
    REQUIRE(f.size() == 256);
    CHECK(f[0] == 4);
    for (std::size_t i = 1; i < f.size(); ++i) {
      CHECK(f[i] == 0);
    }
  }

  TEST_CASE("neighbor value layout is little-endian at fixed offsets") {
    const Frame f = encode(NeighborValuePayload{5, 12}, 256);
    REQUIRE(f.size() == 256);
    CHECK(f[0] == 1);
    CHECK(f[1] == 5);
    CHECK(f[2] == 0);
    CHECK(f[3] == 0);
    CHECK(f[4] == 0);
    CHECK(f[5] == 12);
    CHECK(f[6] == 0);
    CHECK(f[7] == 0);
    CHECK(f[8] == 0);
    for (std::size_t i = 9; i < f.size(); ++i) {
      CHECK(f[i] == 0);
    }
  }

  TEST_CASE("all-zero frame decodes as the empty init") {
    const Frame zeros(256, 0);
    const Payload p = decode(zeros);
    REQUIRE(kind_of(p) == MessageKind::Init);
    CHECK(std::get<InitPayload>(p) == InitPayload{"", ""});
  }

  TEST_CASE("unknown tag is a protocol error") {
    Frame f(256, 0);
    f[0] = 9;
    CHECK_THROWS_AS(decode(f), ProtocolError);
  }

  TEST_CASE("malformed text length is a protocol error") {
    Frame f(256, 0);
    f[0] = 0;
    f[1] = 16;  // ip length byte beyond its 15-byte field
    CHECK_THROWS_AS(decode(f), ProtocolError);
  }

  TEST_CASE("round trip over randomized payloads of every kind") {
    std::mt19937_64 rng(0x5eed);
    for (int i = 0; i < 500; ++i) {
      const Payload p = random_payload(rng);
      const Frame f = encode(p, 256);
      CHECK(f.size() == 256);
      CHECK(decode(f) == p);
      // deterministic encoding
      CHECK(encode(p, 256) == f);
    }
  }

  TEST_CASE("every kind except event fits in the minimum packsize") {
    CHECK_NOTHROW(encode(InitPayload{"10.0.0.1", "02:00:00:00:00:01"}, 64));
    CHECK_NOTHROW(encode(NeighborValuePayload{1, 2}, 64));
    CHECK_NOTHROW(encode(TerminatePayload{100}, 64));
    CHECK_NOTHROW(encode(StopPayload{}, 64));

    EventPayload event;
    event.timestamp = "2020-01-01 00:00:00.000";
    // The event layout ends at byte 69, so 64 cannot hold it; 80 can.
    CHECK(encoded_size(Payload{event}) == 69);
    CHECK_THROWS_AS(encode(event, 64), EncodingError);
    CHECK_NOTHROW(encode(event, 80));
  }

  TEST_CASE("oversized text fields fail to encode") {
    CHECK_THROWS_AS(encode(InitPayload{"101.102.103.1045", "02:00"}, 256),
                    EncodingError);
    EventPayload event;
    event.timestamp = "2020-01-01 00:00:00.0000";  // 24 chars
    CHECK_THROWS_AS(encode(event, 256), EncodingError);
  }

  TEST_CASE("bad packsize is rejected") {
    CHECK_THROWS_AS(encode(StopPayload{}, 48), DomainError);
    CHECK_THROWS_AS(encode(StopPayload{}, 100), DomainError);
    CHECK(valid_packsize(256));
    CHECK_FALSE(valid_packsize(100));
    CHECK_FALSE(valid_packsize(48));
  }
}
