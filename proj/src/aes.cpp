#include "wsn/aes.hpp"

namespace wsn {

namespace {

constexpr std::array<std::uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b,
    0xfe, 0xd7, 0xab, 0x76, 0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0,
    0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0, 0xb7, 0xfd, 0x93, 0x26,
    0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2,
    0xeb, 0x27, 0xb2, 0x75, 0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0,
    0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84, 0x53, 0xd1, 0x00, 0xed,
    0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f,
    0x50, 0x3c, 0x9f, 0xa8, 0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5,
    0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2, 0xcd, 0x0c, 0x13, 0xec,
    0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14,
    0xde, 0x5e, 0x0b, 0xdb, 0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c,
    0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79, 0xe7, 0xc8, 0x37, 0x6d,
    0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f,
    0x4b, 0xbd, 0x8b, 0x8a, 0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e,
    0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e, 0xe1, 0xf8, 0x98, 0x11,
    0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f,
    0xb0, 0x54, 0xbb, 0x16};

constexpr std::array<std::uint8_t, 256> make_inv_sbox() {
  std::array<std::uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<std::uint8_t>(i);
  return inv;
}
constexpr std::array<std::uint8_t, 256> kInvSbox = make_inv_sbox();

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x >> 7) * 0x1b));
}

constexpr std::uint8_t gf_mul(std::uint8_t x, std::uint8_t y) {
  std::uint8_t r = 0;
  for (int i = 0; i < 8; ++i) {
    if (y & 1) r ^= x;
    x = xtime(x);
    y = static_cast<std::uint8_t>(y >> 1);
  }
  return r;
}

// Te0[x] = (2S, S, S, 3S) packed MSB-first; TeK is Te0 rotated right by 8K.
constexpr std::array<std::uint32_t, 256> make_te(int rot) {
  std::array<std::uint32_t, 256> t{};
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t s = kSbox[i];
    const std::uint32_t w = (static_cast<std::uint32_t>(gf_mul(s, 2)) << 24) |
                            (static_cast<std::uint32_t>(s) << 16) |
                            (static_cast<std::uint32_t>(s) << 8) | gf_mul(s, 3);
    t[i] = rot == 0 ? w : (w >> (8 * rot)) | (w << (32 - 8 * rot));
  }
  return t;
}

constexpr auto kTe0 = make_te(0);
constexpr auto kTe1 = make_te(1);
constexpr auto kTe2 = make_te(2);
constexpr auto kTe3 = make_te(3);

constexpr std::uint32_t sub_word(std::uint32_t w) {
  return (static_cast<std::uint32_t>(kSbox[(w >> 24) & 0xff]) << 24) |
         (static_cast<std::uint32_t>(kSbox[(w >> 16) & 0xff]) << 16) |
         (static_cast<std::uint32_t>(kSbox[(w >> 8) & 0xff]) << 8) |
         kSbox[w & 0xff];
}

constexpr std::uint32_t rot_word(std::uint32_t w) { return (w << 8) | (w >> 24); }

std::uint32_t load_be(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void store_be(std::uint8_t* p, std::uint32_t w) {
  p[0] = static_cast<std::uint8_t>(w >> 24);
  p[1] = static_cast<std::uint8_t>(w >> 16);
  p[2] = static_cast<std::uint8_t>(w >> 8);
  p[3] = static_cast<std::uint8_t>(w);
}

constexpr int kNk = 6;   // 192-bit key words
constexpr int kNr = 12;  // rounds

}  // namespace

Aes192::Aes192(const AesKey192& key) {
  for (int i = 0; i < kNk; ++i) {
    round_keys_[i] = load_be(key.data() + 4 * i);
  }
  std::uint32_t rcon = 0x01000000;
  for (int i = kNk; i < 4 * (kNr + 1); ++i) {
    std::uint32_t temp = round_keys_[i - 1];
    if (i % kNk == 0) {
      temp = sub_word(rot_word(temp)) ^ rcon;
      rcon = static_cast<std::uint32_t>(gf_mul(static_cast<std::uint8_t>(rcon >> 24), 2))
             << 24;
    }
    round_keys_[i] = round_keys_[i - kNk] ^ temp;
  }
}

Block16 Aes192::encrypt_block(const Block16& in) const {
  const std::uint32_t* rk = round_keys_.data();
  std::uint32_t s0 = load_be(in.data() + 0) ^ rk[0];
  std::uint32_t s1 = load_be(in.data() + 4) ^ rk[1];
  std::uint32_t s2 = load_be(in.data() + 8) ^ rk[2];
  std::uint32_t s3 = load_be(in.data() + 12) ^ rk[3];

  for (int r = 1; r < kNr; ++r) {
    rk += 4;
    const std::uint32_t t0 = kTe0[s0 >> 24] ^ kTe1[(s1 >> 16) & 0xff] ^
                             kTe2[(s2 >> 8) & 0xff] ^ kTe3[s3 & 0xff] ^ rk[0];
    const std::uint32_t t1 = kTe0[s1 >> 24] ^ kTe1[(s2 >> 16) & 0xff] ^
                             kTe2[(s3 >> 8) & 0xff] ^ kTe3[s0 & 0xff] ^ rk[1];
    const std::uint32_t t2 = kTe0[s2 >> 24] ^ kTe1[(s3 >> 16) & 0xff] ^
                             kTe2[(s0 >> 8) & 0xff] ^ kTe3[s1 & 0xff] ^ rk[2];
    const std::uint32_t t3 = kTe0[s3 >> 24] ^ kTe1[(s0 >> 16) & 0xff] ^
                             kTe2[(s1 >> 8) & 0xff] ^ kTe3[s2 & 0xff] ^ rk[3];
    s0 = t0;
    s1 = t1;
    s2 = t2;
    s3 = t3;
  }

  rk += 4;
  const auto sub = [](std::uint32_t a, std::uint32_t b, std::uint32_t c,
                      std::uint32_t d) {
    return (static_cast<std::uint32_t>(kSbox[a >> 24]) << 24) |
           (static_cast<std::uint32_t>(kSbox[(b >> 16) & 0xff]) << 16) |
           (static_cast<std::uint32_t>(kSbox[(c >> 8) & 0xff]) << 8) |
           kSbox[d & 0xff];
  };
  Block16 out;
  store_be(out.data() + 0, sub(s0, s1, s2, s3) ^ rk[0]);
  store_be(out.data() + 4, sub(s1, s2, s3, s0) ^ rk[1]);
  store_be(out.data() + 8, sub(s2, s3, s0, s1) ^ rk[2]);
  store_be(out.data() + 12, sub(s3, s0, s1, s2) ^ rk[3]);
  return out;
}

Block16 Aes192::decrypt_block(const Block16& in) const {
  // State byte b[4c + r] holds row r of column c.
  Block16 b = in;

  const auto add_round_key = [&](int round) {
    for (int c = 0; c < 4; ++c) {
      const std::uint32_t w = round_keys_[4 * round + c];
      for (int r = 0; r < 4; ++r) {
        b[4 * c + r] ^= static_cast<std::uint8_t>(w >> (24 - 8 * r));
      }
    }
  };
  const auto inv_shift_rows = [&] {
    Block16 t;
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) {
        t[4 * c + r] = b[4 * ((c - r) & 3) + r];
      }
    }
    b = t;
  };
  const auto inv_sub_bytes = [&] {
    for (auto& x : b) x = kInvSbox[x];
  };
  const auto inv_mix_columns = [&] {
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* col = b.data() + 4 * c;
      const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      col[0] = gf_mul(a0, 14) ^ gf_mul(a1, 11) ^ gf_mul(a2, 13) ^ gf_mul(a3, 9);
      col[1] = gf_mul(a0, 9) ^ gf_mul(a1, 14) ^ gf_mul(a2, 11) ^ gf_mul(a3, 13);
      col[2] = gf_mul(a0, 13) ^ gf_mul(a1, 9) ^ gf_mul(a2, 14) ^ gf_mul(a3, 11);
      col[3] = gf_mul(a0, 11) ^ gf_mul(a1, 13) ^ gf_mul(a2, 9) ^ gf_mul(a3, 14);
    }
  };

  add_round_key(kNr);
  for (int r = kNr - 1; r >= 1; --r) {
    inv_shift_rows();
    inv_sub_bytes();
    add_round_key(r);
    inv_mix_columns();
  }
  inv_shift_rows();
  inv_sub_bytes();
  add_round_key(0);
  return b;
}

Block16 block_encrypt(const AesKey192& key, const Block16& block) {
  return Aes192(key).encrypt_block(block);
}

Block16 block_decrypt(const AesKey192& key, const Block16& block) {
  return Aes192(key).decrypt_block(block);
}

}  // namespace wsn
