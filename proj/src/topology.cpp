#include "wsn/topology.hpp"

#include <string>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

void check_sensor_rank(Rank rank, const GridConfig& grid) {
  if (rank < 1 || rank > grid.sensor_count()) {
    throw DomainError("rank " + std::to_string(rank) +
                      " is not a sensor rank (valid: 1.." +
                      std::to_string(grid.sensor_count()) + ")");
  }
}

}  // namespace

int NeighborSet::count() const {
  int n = 0;
  for (const auto& s : slots) {
    if (s) ++n;
  }
  return n;
}

bool NeighborSet::contains(Rank rank) const {
  for (const auto& s : slots) {
    if (s && *s == rank) return true;
  }
  return false;
}

GridPosition position_of(Rank rank, const GridConfig& grid) {
  check_sensor_rank(rank, grid);
  return GridPosition{(rank - 1) / grid.width, (rank - 1) % grid.width};
}

NeighborSet neighbors_of(Rank rank, const GridConfig& grid) {
  const GridPosition pos = position_of(rank, grid);
  NeighborSet set;
  if (pos.col > 0) {
    set.slots[0] = pos.row * grid.width + pos.col;  // left
  }
  if (pos.col < grid.width - 1) {
    set.slots[1] = pos.row * grid.width + pos.col + 2;  // right
  }
  if (pos.row > 0) {
    set.slots[2] = (pos.row - 1) * grid.width + pos.col + 1;  // top
  }
  if (pos.row < grid.height - 1) {
    set.slots[3] = (pos.row + 1) * grid.width + pos.col + 1;  // bottom
  }
  return set;
}

int neighbor_count(Rank rank, const GridConfig& grid) {
  return neighbors_of(rank, grid).count();
}

void validate_layout(const GridConfig& grid, int process_count) {
  if (grid.width < 2 || grid.height < 2) {
    throw ConfigError("grid must be at least 2x2, got " +
                      std::to_string(grid.width) + "x" +
                      std::to_string(grid.height));
  }
  if (process_count != grid.process_count()) {
    throw ConfigError("a " + std::to_string(grid.width) + "x" +
                      std::to_string(grid.height) + " grid needs " +
                      std::to_string(grid.process_count()) +
                      " processes (sensors + base station), got " +
                      std::to_string(process_count));
  }
}

}  // namespace wsn
