#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace wsn {

enum class ClockMode { Real, Virtual };

const char* to_string(ClockMode mode);
ClockMode parse_clock_mode(const std::string& name);

// Deterministic lockstep time accounting for Virtual runs. All actors move
// through the same schedule: a node starts iterating once the go-signal
// lands, each frame delivery costs one fixed hop, each iteration ends with
// the configured interval. Crypto contributes no virtual time, which keeps
// every logged duration reproducible.
struct VirtualSchedule {
  double interval = 1.0;

  static constexpr double kHop = 0.001;

  // Nodes send their init frames at virtual time zero.
  double init_stamp() const { return kHop; }
  // The base's go-signal is sent after it has consumed every init.
  double go_stamp() const { return 2 * kHop; }

  double iteration_start(std::uint32_t t) const {
    return go_stamp() + (t - 1) * (interval + kHop);
  }
  // All neighbor values for iteration t land one hop after the step starts.
  double detect_time(std::uint32_t t) const { return iteration_start(t) + kHop; }
  double neighbor_value_stamp(std::uint32_t t) const { return detect_time(t); }
  double event_stamp(double detect) const { return detect + kHop; }
  // Terminate leaves after the final iteration's interval has elapsed.
  double terminate_stamp(std::uint32_t final_iteration) const {
    return iteration_start(final_iteration + 1) + kHop;
  }
};

// Monotonic seconds since construction; shared by every actor of a Real run.
class RunClock {
 public:
  RunClock() : start_(std::chrono::steady_clock::now()) {}

  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// 23-char "YYYY-MM-DD HH:MM:SS.mmm" at a fixed epoch plus `virtual_seconds`.
std::string timestamp_at_virtual(double virtual_seconds);

/// Same format from the wall clock (UTC).
std::string timestamp_now();

}  // namespace wsn
