#include "wsn/clock.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

// 2020-01-01 00:00:00 UTC; virtual runs date their logs from here.
constexpr std::int64_t kVirtualEpoch = 1577836800;

std::string format_timestamp(std::int64_t unix_seconds, int milliseconds) {
  std::tm tm{};
  const time_t t = static_cast<time_t>(unix_seconds);
  gmtime_r(&t, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d.%03d",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                tm.tm_sec, milliseconds);
  return buf;
}

}  // namespace

const char* to_string(ClockMode mode) {
  return mode == ClockMode::Real ? "real" : "virtual";
}

ClockMode parse_clock_mode(const std::string& name) {
  if (name == "real") return ClockMode::Real;
  if (name == "virtual") return ClockMode::Virtual;
  throw ConfigError("unknown clock mode '" + name + "' (expected real or virtual)");
}

std::string timestamp_at_virtual(double virtual_seconds) {
  const double whole = std::floor(virtual_seconds);
  int ms = static_cast<int>(std::lround((virtual_seconds - whole) * 1000.0));
  std::int64_t secs = kVirtualEpoch + static_cast<std::int64_t>(whole);
  if (ms >= 1000) {
    ms -= 1000;
    ++secs;
  }
  return format_timestamp(secs, ms);
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  return format_timestamp(std::chrono::system_clock::to_time_t(secs),
                          static_cast<int>(ms));
}

}  // namespace wsn
