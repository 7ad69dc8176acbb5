#include "wsn/base.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <istream>
#include <variant>

#include "wsn/clock.hpp"
#include "wsn/errors.hpp"
#include "wsn/secure_channel.hpp"
#include "wsn/util.hpp"

namespace wsn {

NodeRegistry::NodeRegistry(int sensor_count) : entries_(sensor_count) {}

void NodeRegistry::register_node(Rank rank, const InitPayload& init) {
  if (rank < 1 || rank > sensor_count()) {
    throw ProtocolError("init from rank " + std::to_string(rank) +
                        ", which is not a sensor rank");
  }
  Entry& entry = entries_[rank - 1];
  if (entry.registered) {
    throw ProtocolError("duplicate init from rank " + std::to_string(rank));
  }
  entry.ip = init.ip;
  entry.mac = init.mac;
  entry.registered = true;
  ++registered_;
}

bool NodeRegistry::is_registered(Rank rank) const {
  return rank >= 1 && rank <= sensor_count() && entries_[rank - 1].registered;
}

const std::string& NodeRegistry::ip(Rank rank) const { return entries_[rank - 1].ip; }

const std::string& NodeRegistry::mac(Rank rank) const {
  return entries_[rank - 1].mac;
}

namespace {

// One decoded base-bound message awaiting processing. Virtual runs collect
// and process these in (stamp, sender) order, which is the deterministic
// analog of arrival order; real runs process as they arrive.
struct BaseRecord {
  double stamp = 0.0;
  Rank sender = 0;
  Payload payload;
  double decrypt_seconds = 0.0;
  double real_recv_time = 0.0;
};

class BaseStation {
 public:
  explicit BaseStation(const ActorEnv& env)
      : env_(env),
        cfg_(env.config),
        grid_(env.config.grid()),
        schedule_{env.config.interval},
        registry_(grid_.sensor_count()),
        channel_(kBaseRank, env.transport, env.config.cipher, env.config.sched,
                 env.config.packsize),
        final_iterations_(grid_.sensor_count()),
        per_rank_events_(grid_.sensor_count(), 0) {}

  RunSummary run() {
    open_logs();
    registration_phase();
    send_go_signal();
    if (virtual_clock()) {
      event_phase_virtual();
    } else {
      event_phase_real();
    }
    return write_summary();
  }

 private:
  bool virtual_clock() const { return cfg_.clock == ClockMode::Virtual; }

  void open_logs() {
    text_log_.open(cfg_.out_dir / "base_station.log");
    events_csv_.open(cfg_.out_dir / "events.csv");
    events_csv_ << "iteration,activated_rank,value,match_count,matched_left,"
                   "matched_right,matched_top,matched_bottom,detect_time_s,"
                   "recv_time_s,comm_time_s,decrypt_time_s\n";
    timing_csv_.open(cfg_.out_dir / "decrypt_timing.csv");
    timing_csv_ << "rank,iteration,operation,duration_s\n";
  }

  void error_line(const std::string& what) {
    text_log_ << "protocol error: " << what << "\n\n";
    std::cerr << "base station: " << what << '\n';
  }

  void log_decrypt(std::uint32_t iteration, double seconds) {
    timing_csv_ << kBaseRank << ',' << iteration << ",decrypt,"
                << fixed9(virtual_clock() ? 0.0 : seconds) << '\n';
  }

  // Collect width*height init frames; everything else is dropped loudly.
  void registration_phase() {
    while (!registry_.complete()) {
      auto rec = channel_.recv();
      if (!rec) throw TransportError("transport closed during registration");
      log_decrypt(0, rec->decrypt_seconds);
      Payload payload;
      try {
        payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        error_line(e.what());
        continue;
      }
      if (const auto* init = std::get_if<InitPayload>(&payload)) {
        try {
          registry_.register_node(rec->sender, *init);
        } catch (const ProtocolError& e) {
          error_line(e.what());
        }
      } else {
        error_line("unexpected " + std::string(to_string(kind_of(payload))) +
                   " frame from rank " + std::to_string(rec->sender) +
                   " during registration");
      }
    }
  }

  // An empty init echo from the base releases the nodes into the
  // iteration phase.
  void send_go_signal() {
    for (Rank r = 1; r <= grid_.sensor_count(); ++r) {
      channel_.send(r, InitPayload{});
    }
  }

  void event_phase_real() {
    while (terminated_ < grid_.sensor_count()) {
      auto rec = channel_.recv();
      if (!rec) throw TransportError("transport closed before all nodes terminated");
      BaseRecord record;
      record.sender = rec->sender;
      record.decrypt_seconds = rec->decrypt_seconds;
      record.real_recv_time = env_.run_clock->now();
      try {
        record.payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        error_line(e.what());
        continue;
      }
      dispatch(record);
    }
  }

  void event_phase_virtual() {
    std::vector<BaseRecord> records;
    int terminates_seen = 0;
    while (terminates_seen < grid_.sensor_count()) {
      auto rec = channel_.recv();
      if (!rec) throw TransportError("transport closed before all nodes terminated");
      BaseRecord record;
      record.sender = rec->sender;
      record.decrypt_seconds = rec->decrypt_seconds;
      try {
        record.payload = decode(rec->plaintext);
      } catch (const ProtocolError& e) {
        error_line(e.what());
        continue;
      }
      record.stamp = virtual_stamp(record.payload);
      if (std::holds_alternative<TerminatePayload>(record.payload)) {
        ++terminates_seen;
      }
      records.push_back(std::move(record));
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const BaseRecord& a, const BaseRecord& b) {
                       if (a.stamp != b.stamp) return a.stamp < b.stamp;
                       return a.sender < b.sender;
                     });
    for (const auto& record : records) {
      dispatch(record);
    }
  }

  double virtual_stamp(const Payload& payload) const {
    if (const auto* ev = std::get_if<EventPayload>(&payload)) {
      return schedule_.event_stamp(ev->detect_time);
    }
    if (const auto* term = std::get_if<TerminatePayload>(&payload)) {
      return schedule_.terminate_stamp(term->final_iteration);
    }
    return schedule_.init_stamp();
  }

  void dispatch(const BaseRecord& record) {
    if (const auto* ev = std::get_if<EventPayload>(&record.payload)) {
      handle_event(record, *ev);
    } else if (const auto* term = std::get_if<TerminatePayload>(&record.payload)) {
      handle_terminate(record, *term);
    } else {
      error_line("unexpected " + std::string(to_string(kind_of(record.payload))) +
                 " frame from rank " + std::to_string(record.sender) +
                 " during the iteration phase");
    }
  }

  void handle_event(const BaseRecord& record, const EventPayload& ev) {
    const Rank sender = record.sender;
    if (!registry_.is_registered(sender)) {
      error_line("event from unregistered rank " + std::to_string(sender));
      return;
    }

    EventRecord out;
    out.match_count = 0;
    std::int64_t latest = -1;
    for (int s = 0; s < 4; ++s) {
      out.matched_iterations[s] = ev.matched_iterations[s];
      if (ev.matched_iterations[s] >= 0) {
        ++out.match_count;
        latest = std::max(latest, ev.matched_iterations[s]);
      }
    }
    if (out.match_count < 3) {
      error_line("malformed event from rank " + std::to_string(sender) + ": only " +
                 std::to_string(out.match_count) + " matched slots");
      return;
    }

    const NeighborSet neighbors = neighbors_of(sender, grid_);
    for (int s = 0; s < 4; ++s) {
      if (ev.matched_iterations[s] < 0) continue;
      if (!neighbors.slots[s]) {
        error_line("malformed event from rank " + std::to_string(sender) +
                   ": matched " + kNeighborSlotNames[s] + " slot has no neighbor");
        return;
      }
      const Rank adj = *neighbors.slots[s];
      out.adjacents.push_back(AdjacentMatch{adj, registry_.ip(adj), registry_.mac(adj),
                                            ev.matched_iterations[s]});
    }

    // The reporting iteration is the latest matched one; every entry is
    // t or t-1 by construction.
    out.iteration = static_cast<std::uint32_t>(latest);
    out.activated_rank = sender;
    out.ip = registry_.ip(sender);
    out.mac = registry_.mac(sender);
    out.value = ev.value;
    out.detect_time = ev.detect_time;
    out.reported_time = ev.timestamp;
    out.decryption_time = virtual_clock() ? 0.0 : record.decrypt_seconds;
    if (virtual_clock()) {
      out.recv_time = record.stamp;
      out.communication_time = out.decryption_time + VirtualSchedule::kHop;
      now_ = std::max(now_, record.stamp);
      out.logged_time = timestamp_at_virtual(now_);
    } else {
      out.recv_time = record.real_recv_time;
      out.communication_time = out.recv_time - out.detect_time;
      out.logged_time = timestamp_now();
    }

    ++total_events_;
    ++base_messages_;
    out.activations_this_message = out.match_count;
    total_activations_ += static_cast<std::uint64_t>(out.match_count);
    out.total_activations = total_activations_;
    out.messages_with_base = base_messages_;
    ++per_rank_events_[sender - 1];

    write_event_text(out);
    write_event_csv(out);
    log_decrypt(out.iteration, record.decrypt_seconds);
  }

  void handle_terminate(const BaseRecord& record, const TerminatePayload& term) {
    const Rank sender = record.sender;
    if (sender < 1 || sender > grid_.sensor_count() ||
        final_iterations_[sender - 1].has_value()) {
      error_line("unexpected terminate from rank " + std::to_string(sender));
      return;
    }
    final_iterations_[sender - 1] = term.final_iteration;
    ++terminated_;
    ++base_messages_;
    if (virtual_clock()) now_ = std::max(now_, record.stamp);
    text_log_ << "rank " << sender << " terminated after iteration "
              << term.final_iteration << "\n\n";
    log_decrypt(term.final_iteration, record.decrypt_seconds);
  }

  void write_event_text(const EventRecord& r) {
    text_log_ << "--------------------------------------------------\n"
              << "Iteration: " << r.iteration << '\n'
              << "Logged time: " << r.logged_time << '\n'
              << "Reported time: " << r.reported_time << '\n'
              << "Activated node rank: " << r.activated_rank << '\n'
              << "Activated node IP: " << r.ip << '\n'
              << "Activated node MAC: " << r.mac << '\n';
    for (const auto& adj : r.adjacents) {
      text_log_ << "Adjacent rank " << adj.rank << ": matched iteration "
                << adj.matched_iteration << ", IP " << adj.ip << ", MAC " << adj.mac
                << '\n';
    }
    text_log_ << "Value: " << r.value << '\n'
              << "Communication time (s): " << fixed9(r.communication_time) << '\n'
              << "Decryption time (s): " << fixed9(r.decryption_time) << '\n'
              << "Messages with base station: " << r.messages_with_base << '\n'
              << "Activations this message: " << r.activations_this_message << '\n'
              << "Total activations: " << r.total_activations << "\n\n";
  }

  void write_event_csv(const EventRecord& r) {
    events_csv_ << r.iteration << ',' << r.activated_rank << ',' << r.value << ','
                << r.match_count;
    for (int s = 0; s < 4; ++s) {
      events_csv_ << ',' << r.matched_iterations[s];
    }
    events_csv_ << ',' << fixed9(r.detect_time) << ',' << fixed9(r.recv_time) << ','
                << fixed9(r.communication_time) << ',' << fixed9(r.decryption_time)
                << '\n';
  }

  RunSummary write_summary() {
    RunSummary summary;
    summary.total_events = total_events_;
    summary.total_base_messages = base_messages_;
    for (Rank r = 1; r <= grid_.sensor_count(); ++r) {
      const std::uint64_t final_iter = final_iterations_[r - 1].value_or(0);
      summary.total_node_to_node_messages +=
          final_iter * static_cast<std::uint64_t>(neighbor_count(r, grid_));
    }
    summary.total_network_messages = summary.total_node_to_node_messages +
                                     total_events_ +
                                     static_cast<std::uint64_t>(grid_.sensor_count());
    summary.total_activations = total_activations_;
    summary.per_rank_activations = per_rank_events_;
    summary.total_simulation_time = virtual_clock() ? now_ : env_.run_clock->now();

    write_summary_block(text_log_, summary);

    std::ofstream csv(cfg_.out_dir / "summary.csv");
    csv << "total_simulation_time_s,total_events,total_base_messages,"
           "total_node_to_node_messages,total_network_messages,total_activations\n"
        << fixed9(summary.total_simulation_time) << ',' << summary.total_events << ','
        << summary.total_base_messages << ',' << summary.total_node_to_node_messages
        << ',' << summary.total_network_messages << ',' << summary.total_activations
        << "\n"
        << "rank,activations\n";
    for (Rank r = 1; r <= grid_.sensor_count(); ++r) {
      csv << r << ',' << summary.per_rank_activations[r - 1] << '\n';
    }
    return summary;
  }

  const ActorEnv& env_;
  const SimConfig& cfg_;
  GridConfig grid_;
  VirtualSchedule schedule_;
  NodeRegistry registry_;
  SecureChannel channel_;

  std::vector<std::optional<std::uint32_t>> final_iterations_;
  std::vector<std::uint64_t> per_rank_events_;
  std::uint64_t total_events_ = 0;
  std::uint64_t base_messages_ = 0;
  std::uint64_t total_activations_ = 0;
  int terminated_ = 0;
  double now_ = 0.0;  // virtual clock position

  std::ofstream text_log_;
  std::ofstream events_csv_;
  std::ofstream timing_csv_;
};

}  // namespace

RunSummary base_run(const ActorEnv& env) {
  BaseStation base(env);
  return base.run();
}

void write_summary_block(std::ostream& out, const RunSummary& summary) {
  out << "==================================================\n"
      << "Simulation summary\n"
      << "Total simulation time (s): " << fixed9(summary.total_simulation_time) << '\n'
      << "Total events: " << summary.total_events << '\n'
      << "Total messages with base station: " << summary.total_base_messages << '\n'
      << "Total node-to-node messages: " << summary.total_node_to_node_messages << '\n'
      << "Total messages through network: " << summary.total_network_messages << '\n'
      << "Total activations: " << summary.total_activations << '\n'
      << "Activations per node:\n";
  for (std::size_t i = 0; i < summary.per_rank_activations.size(); ++i) {
    out << "rank " << (i + 1) << ": " << summary.per_rank_activations[i] << '\n';
  }
}

void stop_listener(std::istream& in, std::shared_ptr<Transport> transport,
                   const SimConfig& config, const std::atomic<bool>* cancelled) {
  std::string line;
  bool sent = false;
  while (std::getline(in, line)) {
    if (cancelled && cancelled->load()) return;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (sent || line != "stop") continue;
    try {
      SecureChannel channel(kBaseRank, *transport, config.cipher, config.sched,
                            config.packsize);
      for (Rank r = 1; r <= config.grid().sensor_count(); ++r) {
        channel.send(r, StopPayload{});
      }
      sent = true;
    } catch (const Error&) {
      return;  // backend already gone; nothing left to stop
    }
  }
}

}  // namespace wsn
