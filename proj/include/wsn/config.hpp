#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "wsn/clock.hpp"
#include "wsn/crypto.hpp"
#include "wsn/topology.hpp"
#include "wsn/transport.hpp"
#include "wsn/wire.hpp"

namespace wsn {

// Well-known AES-192 exercise key and counter, used when no key file is given.
inline constexpr AesKey192 kDefaultKey = {
    0x8e, 0x73, 0xb0, 0xf7, 0xda, 0x0e, 0x64, 0x52, 0xc8, 0x10, 0xf3, 0x2b,
    0x80, 0x90, 0x79, 0xe5, 0x62, 0xf8, 0xea, 0xd2, 0x52, 0x2c, 0x6b, 0x7b};
inline constexpr Block16 kDefaultIv = {0xf0, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6,
                                       0xf7, 0xf8, 0xf9, 0xfa, 0xfb, 0xfc, 0xfd,
                                       0xfe, 0xff};

struct SimConfig {
  int width = 4;
  int height = 5;
  std::int64_t iterations = 100;  // -1 = run until a stop command
  double interval = 1.0;          // seconds between iterations
  std::uint32_t max_random = 12;  // values drawn from [0, max_random)
  std::size_t packsize = 256;
  SchedulingMode sched = Serial{};
  std::uint64_t seed = 1;
  ClockMode clock = ClockMode::Real;
  Backend backend = Backend::Memory;
  std::uint16_t base_port = 29500;
  CipherConfig cipher{kDefaultKey, kDefaultIv, 1000};
  std::filesystem::path out_dir = "wsn_out";
  bool stdin_stop = false;

  GridConfig grid() const { return GridConfig{width, height}; }

  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

/// Reads a 40-byte key file: 24-byte AES-192 key followed by the 16-byte IV.
void load_key_file(const std::filesystem::path& path, CipherConfig& cipher);

/// Reads `key = value` lines ('#' comments and blank lines skipped).
std::map<std::string, std::string> read_config_map(const std::filesystem::path& path);

/// Parses a sched value of the form "serial", "static:4" or "dynamic:4".
SchedulingMode parse_sched_value(const std::string& value);

/// Writes the scalar parameters of a run as `key = value` lines.
void write_run_config(const SimConfig& config, const std::filesystem::path& path);

/// Reads a run_config.txt written by write_run_config.
SimConfig read_run_config(const std::filesystem::path& path);

}  // namespace wsn
