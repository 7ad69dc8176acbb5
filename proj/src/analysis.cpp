#include "wsn/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "wsn/config.hpp"
#include "wsn/errors.hpp"
#include "wsn/util.hpp"

namespace wsn {

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::size_t expected_fields) {
  std::ifstream in(path);
  if (!in) {
    throw AnalysisError("cannot open " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expected_fields) {
      throw AnalysisError(path.string() + ":" + std::to_string(line_no) + ": got " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(expected_fields));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) {
    throw AnalysisError(path.string() + " has no header row");
  }
  rows.erase(rows.begin());
  return rows;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw AnalysisError(path.string() + ": bad numeric field '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const std::filesystem::path& path) {
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw AnalysisError(path.string() + ": bad integer field '" + s + "'");
  }
}

}  // namespace

std::vector<EventRow> read_events_csv(const std::filesystem::path& path) {
  std::vector<EventRow> events;
  for (const auto& f : read_csv(path, 12)) {
    EventRow row;
    row.iteration = parse_int(f[0], path);
    row.activated_rank = static_cast<Rank>(parse_int(f[1], path));
    row.value = static_cast<std::uint32_t>(parse_int(f[2], path));
    row.match_count = static_cast<int>(parse_int(f[3], path));
    for (int s = 0; s < 4; ++s) row.matched[s] = parse_int(f[4 + s], path);
    row.detect_time_s = parse_double(f[8], path);
    row.recv_time_s = parse_double(f[9], path);
    row.comm_time_s = parse_double(f[10], path);
    row.decrypt_time_s = parse_double(f[11], path);
    events.push_back(row);
  }
  return events;
}

std::vector<TimingSample> read_timing_csv(const std::filesystem::path& path) {
  std::vector<TimingSample> samples;
  for (const auto& f : read_csv(path, 4)) {
    TimingSample s;
    s.rank = static_cast<Rank>(parse_int(f[0], path));
    s.iteration = static_cast<std::uint32_t>(parse_int(f[1], path));
    if (f[2] == "encrypt") {
      s.op = CryptoOp::Encrypt;
    } else if (f[2] == "decrypt") {
      s.op = CryptoOp::Decrypt;
    } else {
      throw AnalysisError(path.string() + ": unknown operation '" + f[2] + "'");
    }
    s.seconds = parse_double(f[3], path);
    samples.push_back(s);
  }
  return samples;
}

RunSummary read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw AnalysisError("cannot open " + path.string());
  }
  std::string line;
  std::getline(in, line);  // totals header
  if (!std::getline(in, line)) {
    throw AnalysisError(path.string() + ": missing totals row");
  }
  const auto totals = split_csv_line(line);
  if (totals.size() != 6) {
    throw AnalysisError(path.string() + ": malformed totals row");
  }
  RunSummary summary;
  summary.total_simulation_time = parse_double(totals[0], path);
  summary.total_events = static_cast<std::uint64_t>(parse_int(totals[1], path));
  summary.total_base_messages = static_cast<std::uint64_t>(parse_int(totals[2], path));
  summary.total_node_to_node_messages =
      static_cast<std::uint64_t>(parse_int(totals[3], path));
  summary.total_network_messages =
      static_cast<std::uint64_t>(parse_int(totals[4], path));
  summary.total_activations = static_cast<std::uint64_t>(parse_int(totals[5], path));
  std::getline(in, line);  // per-rank header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) {
      throw AnalysisError(path.string() + ": malformed per-rank row");
    }
    const auto rank = parse_int(f[0], path);
    if (rank != static_cast<std::int64_t>(summary.per_rank_activations.size()) + 1) {
      throw AnalysisError(path.string() + ": per-rank rows out of order");
    }
    summary.per_rank_activations.push_back(
        static_cast<std::uint64_t>(parse_int(f[1], path)));
  }
  return summary;
}

double average_time(const std::vector<TimingSample>& samples, CryptoOp op) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.op == op) {
      sum += s.seconds;
      ++n;
    }
  }
  if (n == 0) {
    throw AnalysisError(std::string("no ") + to_string(op) + " samples");
  }
  return sum / static_cast<double>(n);
}

double speedup(double serial_avg, double parallel_avg) {
  if (serial_avg <= 0.0 || parallel_avg <= 0.0) {
    throw AnalysisError("speedup needs positive averages");
  }
  return serial_avg / parallel_avg;
}

double combined_average(double at_enc, double at_dec) {
  if (at_enc <= 0.0 || at_dec <= 0.0) {
    throw AnalysisError("combined average needs positive averages");
  }
  return (at_enc + at_dec) / 2.0;
}

std::vector<SeriesPoint> messages_per_iteration(const std::vector<EventRow>& events,
                                                std::int64_t iterations_hint) {
  std::int64_t last = iterations_hint;
  for (const auto& e : events) {
    if (e.iteration < 1) {
      throw AnalysisError("event row with iteration " + std::to_string(e.iteration));
    }
    last = std::max(last, e.iteration);
  }
  std::vector<SeriesPoint> series;
  if (last < 1) return series;
  series.resize(static_cast<std::size_t>(last));
  for (std::int64_t t = 1; t <= last; ++t) {
    series[static_cast<std::size_t>(t - 1)] = SeriesPoint{t, 0.0};
  }
  for (const auto& e : events) {
    series[static_cast<std::size_t>(e.iteration - 1)].value += 1.0;
  }
  return series;
}

std::vector<SeriesPoint> mean_comm_time_series(const std::vector<EventRow>& events) {
  std::map<std::int64_t, std::pair<double, int>> acc;
  for (const auto& e : events) {
    auto& [sum, n] = acc[e.iteration];
    sum += e.comm_time_s;
    ++n;
  }
  std::vector<SeriesPoint> series;
  series.reserve(acc.size());
  for (const auto& [iteration, sum_n] : acc) {
    series.push_back(SeriesPoint{iteration, sum_n.first / sum_n.second});
  }
  return series;
}

TrendLine comm_time_trend(const std::vector<SeriesPoint>& series) {
  if (series.size() < 2) {
    throw AnalysisError("trend fit needs at least 2 points");
  }
  const double n = static_cast<double>(series.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& p : series) {
    mean_x += static_cast<double>(p.iteration);
    mean_y += p.value;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : series) {
    const double dx = static_cast<double>(p.iteration) - mean_x;
    sxx += dx * dx;
    sxy += dx * (p.value - mean_y);
  }
  if (sxx == 0.0) {
    throw AnalysisError("trend fit needs at least 2 distinct iterations");
  }
  TrendLine line;
  line.slope = sxy / sxx;
  line.intercept = mean_y - line.slope * mean_x;
  return line;
}

std::vector<std::vector<std::uint64_t>> activation_grid(
    const std::vector<std::uint64_t>& per_rank_activations, const GridConfig& grid) {
  if (per_rank_activations.size() !=
      static_cast<std::size_t>(grid.sensor_count())) {
    throw AnalysisError("activation grid needs " +
                        std::to_string(grid.sensor_count()) + " per-rank counts, got " +
                        std::to_string(per_rank_activations.size()));
  }
  std::vector<std::vector<std::uint64_t>> matrix(
      grid.height, std::vector<std::uint64_t>(grid.width, 0));
  for (Rank r = 1; r <= grid.sensor_count(); ++r) {
    const GridPosition pos = position_of(r, grid);
    matrix[pos.row][pos.col] = per_rank_activations[r - 1];
  }
  return matrix;
}

std::vector<TimingSample> read_run_timings(const std::filesystem::path& run_dir) {
  const SimConfig config = read_run_config(run_dir / "run_config.txt");
  std::vector<TimingSample> all;
  for (Rank r = 1; r <= config.grid().sensor_count(); ++r) {
    const auto path = run_dir / ("node_" + std::to_string(r) + "_timing.csv");
    for (auto& s : read_timing_csv(path)) {
      if (s.op == CryptoOp::Encrypt) all.push_back(s);
    }
  }
  for (auto& s : read_timing_csv(run_dir / "decrypt_timing.csv")) {
    if (s.op == CryptoOp::Decrypt) all.push_back(s);
  }
  return all;
}

namespace {

void check_comparable(const SimConfig& a, const SimConfig& b,
                      const std::filesystem::path& dir) {
  if (a.width != b.width || a.height != b.height || a.iterations != b.iterations ||
      a.interval != b.interval || a.max_random != b.max_random ||
      a.packsize != b.packsize || a.seed != b.seed || a.clock != b.clock ||
      a.cipher.rounds != b.cipher.rounds) {
    throw AnalysisError("run " + dir.string() +
                        " differs from the serial baseline in more than the "
                        "scheduling mode");
  }
}

}  // namespace

SpeedupReport speedup_report(const std::filesystem::path& serial_dir,
                             const std::filesystem::path& parallel_dir) {
  const SimConfig serial_cfg = read_run_config(serial_dir / "run_config.txt");
  const SimConfig parallel_cfg = read_run_config(parallel_dir / "run_config.txt");
  check_comparable(serial_cfg, parallel_cfg, parallel_dir);

  const auto serial_samples = read_run_timings(serial_dir);
  const auto parallel_samples = read_run_timings(parallel_dir);

  SpeedupReport report;
  report.mode_label = to_string(parallel_cfg.sched);
  report.at_enc_serial = average_time(serial_samples, CryptoOp::Encrypt);
  report.at_enc_parallel = average_time(parallel_samples, CryptoOp::Encrypt);
  report.at_dec_serial = average_time(serial_samples, CryptoOp::Decrypt);
  report.at_dec_parallel = average_time(parallel_samples, CryptoOp::Decrypt);
  report.at_total_serial = combined_average(report.at_enc_serial, report.at_dec_serial);
  report.at_total_parallel =
      combined_average(report.at_enc_parallel, report.at_dec_parallel);
  report.sp_encryption = speedup(report.at_enc_serial, report.at_enc_parallel);
  report.sp_decryption = speedup(report.at_dec_serial, report.at_dec_parallel);
  report.sp_total = speedup(report.at_total_serial, report.at_total_parallel);
  return report;
}

RunAnalysis analyze_run(const std::filesystem::path& run_dir) {
  const SimConfig config = read_run_config(run_dir / "run_config.txt");
  const auto events = read_events_csv(run_dir / "events.csv");

  RunAnalysis analysis;
  analysis.summary = read_summary_csv(run_dir / "summary.csv");
  analysis.messages =
      messages_per_iteration(events, config.iterations > 0 ? config.iterations : 0);
  analysis.comm_means = mean_comm_time_series(events);
  if (analysis.comm_means.size() >= 2) {
    analysis.trend = comm_time_trend(analysis.comm_means);
    analysis.has_trend = true;
  }
  analysis.grid = activation_grid(analysis.summary.per_rank_activations, config.grid());
  return analysis;
}

void write_analysis_outputs(const RunAnalysis& analysis,
                            const std::filesystem::path& run_dir) {
  {
    std::ofstream out(run_dir / "series_messages.csv");
    out << "iteration,messages\n";
    for (const auto& p : analysis.messages) {
      out << p.iteration << ',' << static_cast<std::uint64_t>(p.value) << '\n';
    }
  }
  {
    std::ofstream out(run_dir / "series_commtime.csv");
    out << "iteration,mean_comm_time_s,trend_s\n";
    for (const auto& p : analysis.comm_means) {
      const double trend = analysis.has_trend
                               ? analysis.trend.intercept +
                                     analysis.trend.slope * static_cast<double>(p.iteration)
                               : p.value;
      out << p.iteration << ',' << fixed9(p.value) << ',' << fixed9(trend) << '\n';
    }
  }
  {
    std::ofstream out(run_dir / "activation_grid.csv");
    for (const auto& row : analysis.grid) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << row[c];
      }
      out << '\n';
    }
  }
}

}  // namespace wsn
