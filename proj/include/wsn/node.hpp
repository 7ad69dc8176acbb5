#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "wsn/clock.hpp"
#include "wsn/config.hpp"
#include "wsn/topology.hpp"
#include "wsn/transport.hpp"

namespace wsn {

struct MatchResult {
  // Wire semantics: entry s is the iteration whose value matched in slot s,
  // -1 for no match or absent neighbor.
  std::array<std::int64_t, 4> matched_iterations{-1, -1, -1, -1};
  int match_count = 0;
};

/// Uniform draw from [0, max_random); advances the generator.
std::uint32_t generate_value(std::mt19937_64& rng, std::uint32_t max_random);

/// Depth-2 sliding-window match: a neighbor slot matches at the current
/// iteration when its received value equals own_value, else at the previous
/// iteration when its saved value does. An event needs >= 3 matching slots.
std::optional<MatchResult> detect_event(
    std::uint32_t own_value, std::uint32_t iteration,
    const std::array<std::optional<std::uint32_t>, 4>& received,
    const std::array<std::optional<std::uint32_t>, 4>& previous);

// Deterministic simulated identity, unique per rank.
std::string node_ip(Rank rank);
std::string node_mac(Rank rank);

struct ActorEnv {
  const SimConfig& config;
  Transport& transport;
  const RunClock* run_clock = nullptr;  // Real clock mode only
};

/// Full sensor-node lifecycle: init handshake, lockstep iteration loop with
/// neighbor exchange and event reporting, termination. Writes
/// node_<rank>.log and node_<rank>_timing.csv under config.out_dir.
void node_run(Rank rank, const ActorEnv& env);

}  // namespace wsn
