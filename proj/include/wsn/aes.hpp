#pragma once

#include <array>
#include <cstdint>

namespace wsn {

using Block16 = std::array<std::uint8_t, 16>;
using AesKey192 = std::array<std::uint8_t, 24>;

// FIPS-197 AES-192 block cipher with a precomputed key schedule.
// Table-based forward cipher; the inverse cipher is a plain byte-wise
// implementation (only exercised by round-trip checks).
class Aes192 {
 public:
  explicit Aes192(const AesKey192& key);

  Block16 encrypt_block(const Block16& in) const;
  Block16 decrypt_block(const Block16& in) const;

 private:
  std::array<std::uint32_t, 52> round_keys_{};
};

// One-shot helpers; expand the key schedule per call.
Block16 block_encrypt(const AesKey192& key, const Block16& block);
Block16 block_decrypt(const AesKey192& key, const Block16& block);

}  // namespace wsn
