#include "wsn/crypto.hpp"

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

// Accumulated keystream for one chunk: XOR of the cipher outputs over all
// round counters of that chunk.
Block16 chunk_keystream(const Aes192& cipher, const Block16& iv, std::uint32_t rounds,
                        std::size_t chunk_count, std::size_t chunk_index,
                        std::uint64_t& block_calls) {
  Block16 ks{};
  for (std::uint32_t r = 0; r < rounds; ++r) {
    const std::uint64_t index =
        static_cast<std::uint64_t>(r) * chunk_count + chunk_index;
    const Block16 out = cipher.encrypt_block(counter_block(iv, index));
    for (int i = 0; i < 16; ++i) ks[i] ^= out[i];
    ++block_calls;
  }
  return ks;
}

void apply_chunk(Frame& frame, const Aes192& cipher, const CipherConfig& config,
                 std::size_t chunk_count, std::size_t c, std::uint64_t& block_calls) {
  const Block16 ks =
      chunk_keystream(cipher, config.iv, config.rounds, chunk_count, c, block_calls);
  std::uint8_t* chunk = frame.data() + c * CipherConfig::kChunkSize;
  for (int i = 0; i < 16; ++i) chunk[i] ^= ks[i];
}

}  // namespace

std::string to_string(const SchedulingMode& mode) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Serial>) {
          return "serial";
        } else if constexpr (std::is_same_v<T, Static>) {
          return "static:" + std::to_string(m.workers);
        } else {
          return "dynamic:" + std::to_string(m.workers);
        }
      },
      mode);
}

SchedulingMode parse_scheduling_mode(const std::string& name, unsigned workers) {
  if (workers < 1) {
    throw ConfigError("scheduling workers must be >= 1");
  }
  if (name == "serial") return Serial{};
  if (name == "static") return Static{workers};
  if (name == "dynamic") return Dynamic{workers};
  throw ConfigError("unknown scheduling mode '" + name +
                    "' (expected serial, static or dynamic)");
}

const char* to_string(CryptoOp op) {
  return op == CryptoOp::Encrypt ? "encrypt" : "decrypt";
}

Block16 counter_block(const Block16& iv, std::uint64_t index) {
  Block16 out = iv;
  // Byte-wise big-endian addition; the carry chain wraps modulo 2^128.
  unsigned carry = 0;
  for (int i = 15; i >= 0 && (index != 0 || carry != 0); --i) {
    const unsigned sum = out[i] + static_cast<unsigned>(index & 0xff) + carry;
    out[i] = static_cast<std::uint8_t>(sum);
    carry = sum >> 8;
    index >>= 8;
  }
  return out;
}

double xcrypt(Frame& frame, const CipherConfig& config, const SchedulingMode& mode,
              XcryptStats* stats) {
  if (frame.size() % CipherConfig::kChunkSize != 0 || frame.empty()) {
    throw DomainError("frame of " + std::to_string(frame.size()) +
                      " bytes is not a positive multiple of 16");
  }
  if (config.rounds < 1) {
    throw ConfigError("cipher rounds must be >= 1");
  }
  const std::size_t chunk_count = frame.size() / CipherConfig::kChunkSize;
  const auto start = std::chrono::steady_clock::now();
  const Aes192 cipher(config.key);
  std::uint64_t total_calls = 0;

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Serial>) {
          for (std::size_t c = 0; c < chunk_count; ++c) {
            apply_chunk(frame, cipher, config, chunk_count, c, total_calls);
          }
        } else if constexpr (std::is_same_v<T, Static>) {
          // Contiguous ranges, sizes differing by at most one.
          const unsigned workers = m.workers;
          std::vector<std::uint64_t> calls(workers, 0);
          std::vector<std::thread> pool;
          pool.reserve(workers);
          for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = chunk_count * w / workers;
            const std::size_t end = chunk_count * (w + 1) / workers;
            if (begin == end) continue;
            pool.emplace_back([&, w, begin, end] {
              for (std::size_t c = begin; c < end; ++c) {
                apply_chunk(frame, cipher, config, chunk_count, c, calls[w]);
              }
            });
          }
          for (auto& t : pool) t.join();
          for (const auto n : calls) total_calls += n;
        } else {
          // Workers claim the lowest unclaimed chunk from a shared counter.
          const unsigned workers = m.workers;
          std::atomic<std::size_t> next{0};
          std::vector<std::uint64_t> calls(workers, 0);
          std::vector<std::thread> pool;
          pool.reserve(workers);
          for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
              for (;;) {
                const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= chunk_count) break;
                apply_chunk(frame, cipher, config, chunk_count, c, calls[w]);
              }
            });
          }
          for (auto& t : pool) t.join();
          for (const auto n : calls) total_calls += n;
        }
      },
      mode);

  if (stats) stats->block_cipher_calls += total_calls;
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count();
}

bool keystream_nonzero(const CipherConfig& config, std::size_t chunks) {
  if (chunks < 1) {
    throw DomainError("keystream check needs at least one chunk");
  }
  const Aes192 cipher(config.key);
  std::uint64_t calls = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const Block16 ks = chunk_keystream(cipher, config.iv, config.rounds, chunks, c, calls);
    for (const auto b : ks) {
      if (b != 0) return true;
    }
  }
  return false;
}

}  // namespace wsn
