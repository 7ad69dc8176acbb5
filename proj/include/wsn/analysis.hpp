#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wsn/base.hpp"
#include "wsn/crypto.hpp"
#include "wsn/topology.hpp"

namespace wsn {

// One parsed events.csv row.
struct EventRow {
  std::int64_t iteration = 0;
  Rank activated_rank = 0;
  std::uint32_t value = 0;
  int match_count = 0;
  std::array<std::int64_t, 4> matched{-1, -1, -1, -1};
  double detect_time_s = 0.0;
  double recv_time_s = 0.0;
  double comm_time_s = 0.0;
  double decrypt_time_s = 0.0;
};

struct SeriesPoint {
  std::int64_t iteration = 0;
  double value = 0.0;
};

struct TrendLine {
  double slope = 0.0;
  double intercept = 0.0;
};

std::vector<EventRow> read_events_csv(const std::filesystem::path& path);
std::vector<TimingSample> read_timing_csv(const std::filesystem::path& path);
RunSummary read_summary_csv(const std::filesystem::path& path);

/// Arithmetic mean of the samples of one operation kind.
double average_time(const std::vector<TimingSample>& samples, CryptoOp op);

/// serial_avg / parallel_avg; both must be positive.
double speedup(double serial_avg, double parallel_avg);

/// (at_enc + at_dec) / 2; both must be positive.
double combined_average(double at_enc, double at_dec);

/// Event count per iteration, zero-filled over 1..max(last event iteration,
/// iterations_hint). Pass hint <= 0 to size the series from the data alone.
std::vector<SeriesPoint> messages_per_iteration(const std::vector<EventRow>& events,
                                                std::int64_t iterations_hint);

/// Mean communication time of the iterations that saw at least one event.
std::vector<SeriesPoint> mean_comm_time_series(const std::vector<EventRow>& events);

/// Ordinary least squares of value on iteration; needs >= 2 points.
TrendLine comm_time_trend(const std::vector<SeriesPoint>& series);

/// height x width matrix of per-cell activation counts.
std::vector<std::vector<std::uint64_t>> activation_grid(
    const std::vector<std::uint64_t>& per_rank_activations, const GridConfig& grid);

// Eq-style averaged timings and speedups of one parallel run against the
// serial baseline.
struct SpeedupReport {
  std::string mode_label;
  double at_enc_serial = 0.0;
  double at_enc_parallel = 0.0;
  double at_dec_serial = 0.0;
  double at_dec_parallel = 0.0;
  double at_total_serial = 0.0;
  double at_total_parallel = 0.0;
  double sp_encryption = 0.0;
  double sp_decryption = 0.0;
  double sp_total = 0.0;
};

/// All encrypt samples from the node timing CSVs plus decrypt samples from
/// the base station CSV of one run directory.
std::vector<TimingSample> read_run_timings(const std::filesystem::path& run_dir);

/// Builds the report for one parallel run dir against the serial baseline
/// dir; both must share every parameter except the scheduling mode.
SpeedupReport speedup_report(const std::filesystem::path& serial_dir,
                             const std::filesystem::path& parallel_dir);

// Per-run analysis artifacts; write_analysis_outputs persists them as
// series_messages.csv, series_commtime.csv and activation_grid.csv.
struct RunAnalysis {
  std::vector<SeriesPoint> messages;
  std::vector<SeriesPoint> comm_means;
  TrendLine trend{};
  bool has_trend = false;
  std::vector<std::vector<std::uint64_t>> grid;
  RunSummary summary;
};

RunAnalysis analyze_run(const std::filesystem::path& run_dir);
void write_analysis_outputs(const RunAnalysis& analysis,
                            const std::filesystem::path& run_dir);

}  // namespace wsn
