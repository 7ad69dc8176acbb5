#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/node.hpp"
#include "wsn/topology.hpp"
#include "wsn/transport.hpp"
#include "wsn/wire.hpp"

namespace wsn {

// Identity reported by each sensor during the init handshake.
class NodeRegistry {
 public:
  explicit NodeRegistry(int sensor_count);

  /// Throws ProtocolError on duplicate registration or non-sensor ranks.
  void register_node(Rank rank, const InitPayload& init);

  bool complete() const { return registered_ == sensor_count(); }
  bool is_registered(Rank rank) const;
  const std::string& ip(Rank rank) const;
  const std::string& mac(Rank rank) const;
  int sensor_count() const { return static_cast<int>(entries_.size()); }

 private:
  struct Entry {
    std::string ip;
    std::string mac;
    bool registered = false;
  };
  std::vector<Entry> entries_;  // index rank-1
  int registered_ = 0;
};

struct AdjacentMatch {
  Rank rank = 0;
  std::string ip;
  std::string mac;
  std::int64_t matched_iteration = -1;
};

// Everything the base station logs for one event report.
struct EventRecord {
  std::uint32_t iteration = 0;
  std::string logged_time;    // base clock at write
  std::string reported_time;  // timestamp text from the payload
  Rank activated_rank = 0;
  std::string ip;
  std::string mac;
  std::vector<AdjacentMatch> adjacents;
  std::uint32_t value = 0;
  std::array<std::int64_t, 4> matched_iterations{-1, -1, -1, -1};
  int match_count = 0;
  double detect_time = 0.0;
  double recv_time = 0.0;
  double communication_time = 0.0;
  double decryption_time = 0.0;
  std::uint64_t messages_with_base = 0;
  int activations_this_message = 0;
  std::uint64_t total_activations = 0;
};

struct RunSummary {
  double total_simulation_time = 0.0;
  std::uint64_t total_events = 0;
  std::uint64_t total_base_messages = 0;      // events + terminations
  std::uint64_t total_node_to_node_messages = 0;
  std::uint64_t total_network_messages = 0;   // node-to-node + events + terminations
  std::uint64_t total_activations = 0;        // sum of per-event matched-slot counts
  std::vector<std::uint64_t> per_rank_activations;  // index rank-1, event frames sent
};

/// Base-station lifecycle: registration barrier, go-signal, event phase,
/// termination barrier, summary. Writes base_station.log, events.csv,
/// decrypt_timing.csv and summary.csv under config.out_dir.
RunSummary base_run(const ActorEnv& env);

/// Reads lines from `in`; on the exact line "stop" sends one encrypted Stop
/// frame to every sensor rank, once. Exits silently when the stream ends or
/// `cancelled` is set.
void stop_listener(std::istream& in, std::shared_ptr<Transport> transport,
                   const SimConfig& config, const std::atomic<bool>* cancelled);

/// The human-readable summary block, as written to base_station.log and
/// printed by the CLI after a run.
void write_summary_block(std::ostream& out, const RunSummary& summary);

}  // namespace wsn
