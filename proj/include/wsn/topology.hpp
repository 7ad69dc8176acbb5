#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace wsn {

// Rank 0 is the base station; ranks 1..width*height are sensor nodes.
using Rank = std::int32_t;

inline constexpr Rank kBaseRank = 0;

struct GridConfig {
  int width = 0;   // columns
  int height = 0;  // rows

  int sensor_count() const { return width * height; }
  int process_count() const { return width * height + 1; }
};

struct GridPosition {
  int row = 0;
  int col = 0;

  bool operator==(const GridPosition&) const = default;
};

// Adjacent sensor ranks in fixed (left, right, top, bottom) slot order.
// Absent slots mark edge and corner cells.
struct NeighborSet {
  std::array<std::optional<Rank>, 4> slots{};

  std::optional<Rank> left() const { return slots[0]; }
  std::optional<Rank> right() const { return slots[1]; }
  std::optional<Rank> top() const { return slots[2]; }
  std::optional<Rank> bottom() const { return slots[3]; }

  int count() const;
  bool contains(Rank rank) const;

  bool operator==(const NeighborSet&) const = default;
};

inline constexpr std::array<const char*, 4> kNeighborSlotNames{"left", "right",
                                                               "top", "bottom"};

/// Grid cell of a sensor rank. Throws DomainError for rank 0 or out-of-range
/// ranks (the base station has no grid position).
GridPosition position_of(Rank rank, const GridConfig& grid);

/// Adjacent sensor ranks of `rank`, with absent slots on edges and corners.
NeighborSet neighbors_of(Rank rank, const GridConfig& grid);

/// Number of present neighbors: 2 (corner), 3 (edge) or 4 (interior).
int neighbor_count(Rank rank, const GridConfig& grid);

/// Checks process_count == width*height + 1 with both dimensions >= 2.
/// Throws ConfigError naming expected vs actual on mismatch.
void validate_layout(const GridConfig& grid, int process_count);

}  // namespace wsn
