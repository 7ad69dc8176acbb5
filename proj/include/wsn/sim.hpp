#pragma once

#include <cstdint>

#include "wsn/base.hpp"
#include "wsn/config.hpp"

namespace wsn {

/// Avalanche mix of the master seed and a rank; distinct ranks get distinct,
/// decorrelated generator seeds.
std::uint64_t derive_node_seed(std::uint64_t master_seed, Rank rank);

/// Runs one full simulation: spawns the base station and width*height node
/// actors on the configured transport, executes the lifecycle and returns
/// the base station's summary. Log files land under config.out_dir.
RunSummary run(const SimConfig& config);

}  // namespace wsn
