#include "wsn/node.hpp"

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <thread>

#include "wsn/errors.hpp"
#include "wsn/secure_channel.hpp"
#include "wsn/sim.hpp"
#include "wsn/util.hpp"

namespace wsn {

std::uint32_t generate_value(std::mt19937_64& rng, std::uint32_t max_random) {
  if (max_random < 2) {
    throw ConfigError("max_random must be >= 2");
  }
  return static_cast<std::uint32_t>(rng() % max_random);
}

std::optional<MatchResult> detect_event(
    std::uint32_t own_value, std::uint32_t iteration,
    const std::array<std::optional<std::uint32_t>, 4>& received,
    const std::array<std::optional<std::uint32_t>, 4>& previous) {
  MatchResult result;
  for (int s = 0; s < 4; ++s) {
    if (received[s] && *received[s] == own_value) {
      result.matched_iterations[s] = iteration;
      ++result.match_count;
    } else if (previous[s] && *previous[s] == own_value) {
      result.matched_iterations[s] = static_cast<std::int64_t>(iteration) - 1;
      ++result.match_count;
    }
  }
  if (result.match_count < 3) return std::nullopt;
  return result;
}

std::string node_ip(Rank rank) {
  return "10.0." + std::to_string(rank / 256) + "." + std::to_string(rank % 256);
}

std::string node_mac(Rank rank) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "02:00:00:00:%02x:%02x", (rank >> 8) & 0xff,
                rank & 0xff);
  return buf;
}

namespace {

class NodeActor {
 public:
  NodeActor(Rank rank, const ActorEnv& env)
      : rank_(rank),
        env_(env),
        cfg_(env.config),
        neighbors_(neighbors_of(rank, env.config.grid())),
        schedule_{env.config.interval},
        channel_(rank, env.transport, env.config.cipher, env.config.sched,
                 env.config.packsize),
        rng_(derive_node_seed(env.config.seed, rank)) {}

  void run() {
    open_logs();
    send_logged(kBaseRank, InitPayload{node_ip(rank_), node_mac(rank_)}, 0);
    if (!wait_for_go()) return;  // transport closed before the run started

    std::uint32_t completed = 0;
    while (!stop_ && (cfg_.iterations < 0 ||
                      completed < static_cast<std::uint64_t>(cfg_.iterations))) {
      if (!step(completed + 1)) break;  // stop or shutdown observed mid-step
      completed += 1;
      poll_between_iterations(completed);
    }
    send_logged(kBaseRank, TerminatePayload{completed}, completed);
  }

 private:
  bool virtual_clock() const { return cfg_.clock == ClockMode::Virtual; }

  // Virtual runs log zero durations so every file byte is seed-determined.
  double logged_duration(double measured) const {
    return virtual_clock() ? 0.0 : measured;
  }

  void open_logs() {
    const auto dir = cfg_.out_dir;
    frame_log_.open(dir / ("node_" + std::to_string(rank_) + ".log"));
    timing_log_.open(dir / ("node_" + std::to_string(rank_) + "_timing.csv"));
    timing_log_ << "rank,iteration,operation,duration_s\n";
  }

  void log_timing(std::uint32_t iteration, CryptoOp op, double seconds) {
    timing_log_ << rank_ << ',' << iteration << ',' << to_string(op) << ','
                << fixed9(logged_duration(seconds)) << '\n';
  }

  void send_logged(Rank dest, const Payload& payload, std::uint32_t iteration) {
    const auto sent = channel_.send(dest, payload);
    log_timing(iteration, CryptoOp::Encrypt, sent.encrypt_seconds);
    frame_log_ << "original: "
               << text_with_hex_escapes(sent.plaintext.data(), sent.plaintext.size())
               << '\n'
               << "encryption_time_s: " << fixed9(logged_duration(sent.encrypt_seconds))
               << '\n'
               << "encrypted: " << to_hex(sent.ciphertext) << "\n\n";
  }

  bool wait_for_go() {
    for (;;) {
      auto rec = channel_.recv();
      if (!rec) return false;
      log_timing(0, CryptoOp::Decrypt, rec->decrypt_seconds);
      Payload payload;
      try {
        payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        drop(rec->sender, e.what());
        continue;
      }
      if (std::holds_alternative<StopPayload>(payload)) {
        stop_ = true;  // operator stopped the run before it began
        continue;
      }
      if (std::holds_alternative<InitPayload>(payload) && rec->sender == kBaseRank) {
        return true;  // go-signal
      }
      if (const auto* nv = std::get_if<NeighborValuePayload>(&payload)) {
        // A neighbor whose go-signal landed first may already be sending
        // its first values; the barrier only orders nodes against the base.
        const int s = slot_of(rec->sender);
        if (s >= 0 && nv->iteration == 1) {
          pending_[s].push_back(*nv);
          continue;
        }
      }
      drop(rec->sender, "unexpected frame before the iteration phase");
    }
  }

  // One full iteration. Returns false when the step was aborted by a stop
  // command or transport shutdown (the iteration does not count).
  bool step(std::uint32_t iteration) {
    const std::uint32_t value = generate_value(rng_, cfg_.max_random);
    for (int s = 0; s < 4; ++s) {
      if (neighbors_.slots[s]) {
        send_logged(*neighbors_.slots[s], NeighborValuePayload{value, iteration},
                    iteration);
      }
    }

    std::array<std::optional<std::uint32_t>, 4> received{};
    const int need = neighbors_.count();
    int have = 0;
    for (int s = 0; s < 4; ++s) {
      if (!pending_[s].empty()) {
        const NeighborValuePayload head = pending_[s].front();
        pending_[s].pop_front();
        if (head.iteration != iteration) {
          throw ProtocolError("rank " + std::to_string(rank_) +
                              " buffered value for iteration " +
                              std::to_string(head.iteration) + " consumed at " +
                              std::to_string(iteration));
        }
        received[s] = head.value;
        ++have;
      }
    }
    while (have < need) {
      auto rec = channel_.recv();
      if (!rec) return false;
      log_timing(iteration, CryptoOp::Decrypt, rec->decrypt_seconds);
      Payload payload;
      try {
        payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        drop(rec->sender, e.what());
        continue;
      }
      if (std::holds_alternative<StopPayload>(payload)) {
        // A neighbor that stopped at the previous boundary will never send
        // this iteration's value; abandon the step and terminate.
        stop_ = true;
        return false;
      }
      if (const auto* nv = std::get_if<NeighborValuePayload>(&payload)) {
        store_neighbor_value(*nv, rec->sender, iteration, received, have);
        continue;
      }
      drop(rec->sender, "unexpected frame during neighbor exchange");
    }

    if (const auto match = detect_event(value, iteration, received, previous_)) {
      const double detect_time = virtual_clock() ? schedule_.detect_time(iteration)
                                                 : env_.run_clock->now();
      const std::string stamp = virtual_clock() ? timestamp_at_virtual(detect_time)
                                                : timestamp_now();
      send_logged(kBaseRank,
                  EventPayload{value, match->matched_iterations, detect_time, stamp},
                  iteration);
      ++activations_;
    }

    previous_ = received;
    if (!virtual_clock() && cfg_.interval > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.interval));
    }
    return true;
  }

  void store_neighbor_value(const NeighborValuePayload& nv, Rank sender,
                            std::uint32_t iteration,
                            std::array<std::optional<std::uint32_t>, 4>& received,
                            int& have) {
    const int s = slot_of(sender);
    if (s < 0) {
      drop(sender, "neighbor value from a non-adjacent rank");
      return;
    }
    if (nv.iteration == iteration && !received[s]) {
      received[s] = nv.value;
      ++have;
    } else if (nv.iteration == iteration + 1) {
      pending_[s].push_back(nv);  // sender is one step ahead
    } else {
      throw ProtocolError("rank " + std::to_string(rank_) + " got iteration " +
                          std::to_string(nv.iteration) + " from rank " +
                          std::to_string(sender) + " while at " +
                          std::to_string(iteration));
    }
  }

  // Stop commands are looked for between iterations; early neighbor values
  // for the next step are buffered on the way.
  void poll_between_iterations(std::uint32_t completed) {
    for (;;) {
      auto rec = channel_.try_recv();
      if (!rec) return;
      log_timing(completed, CryptoOp::Decrypt, rec->decrypt_seconds);
      Payload payload;
      try {
        payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        drop(rec->sender, e.what());
        continue;
      }
      if (std::holds_alternative<StopPayload>(payload)) {
        stop_ = true;
        continue;
      }
      if (const auto* nv = std::get_if<NeighborValuePayload>(&payload)) {
        const int s = slot_of(rec->sender);
        if (s >= 0 && nv->iteration == completed + 1) {
          pending_[s].push_back(*nv);
        } else {
          throw ProtocolError("rank " + std::to_string(rank_) +
                              " got out-of-window iteration " +
                              std::to_string(nv->iteration) + " between steps");
        }
        continue;
      }
      drop(rec->sender, "unexpected frame between iterations");
    }
  }

  int slot_of(Rank sender) const {
    for (int s = 0; s < 4; ++s) {
      if (neighbors_.slots[s] && *neighbors_.slots[s] == sender) return s;
    }
    return -1;
  }

  void drop(Rank sender, const std::string& why) {
    std::cerr << "node " << rank_ << ": dropped frame from rank " << sender << ": "
              << why << '\n';
  }

  Rank rank_;
  const ActorEnv& env_;
  const SimConfig& cfg_;
  NeighborSet neighbors_;
  VirtualSchedule schedule_;
  SecureChannel channel_;
  std::mt19937_64 rng_;
  std::array<std::optional<std::uint32_t>, 4> previous_{};
  std::array<std::deque<NeighborValuePayload>, 4> pending_{};
  std::uint64_t activations_ = 0;
  bool stop_ = false;
  std::ofstream frame_log_;
  std::ofstream timing_log_;
};

}  // namespace

void node_run(Rank rank, const ActorEnv& env) {
  NodeActor actor(rank, env);
  actor.run();
}

}  // namespace wsn
