// Acceptance suite: runs every gate criterion and prints one PASS/FAIL line
// per criterion. Exits nonzero if any criterion fails. argv[1] must be the
// path of the wsn CLI binary (used by the stop-protocol criterion).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wsn/analysis.hpp"
#include "wsn/config.hpp"
#include "wsn/crypto.hpp"
#include "wsn/sim.hpp"
#include "wsn/topology.hpp"

using namespace wsn;

namespace {

std::string g_cli_path;

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wsn_acceptance_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

SimConfig table_config(std::uint64_t seed, const std::filesystem::path& out_dir,
                       std::uint32_t rounds) {
  SimConfig config;  // width 4, height 5, iterations 100, interval 1,
                     // max_random 12, packsize 256 are the defaults
  config.seed = seed;
  config.clock = ClockMode::Virtual;
  config.backend = Backend::Memory;
  config.cipher.rounds = rounds;
  config.out_dir = out_dir;
  return config;
}

struct Failure {
  std::string detail;
};

// Set by a check when its stated hardware precondition does not hold; the
// criterion is reported as SKIP and does not fail the suite.
std::string g_skip_reason;

bool run_criterion(int number, const std::string& title,
                   const std::function<std::optional<Failure>(std::string&)>& check) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<Failure> failure;
  std::string note;
  g_skip_reason.clear();
  try {
    failure = check(note);
  } catch (const std::exception& e) {
    failure = Failure{std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const char* status = failure ? "FAIL" : (g_skip_reason.empty() ? "PASS" : "SKIP");
  std::printf("CRITERION %2d: %s - %s (%.2fs)%s%s%s%s%s%s\n", number, status,
              title.c_str(), seconds, note.empty() ? "" : "; ", note.c_str(),
              g_skip_reason.empty() ? "" : "; ", g_skip_reason.c_str(),
              failure ? "; " : "", failure ? failure->detail.c_str() : "");
  std::fflush(stdout);
  return !failure;
}

// ---- criterion 1: topology vs brute force ----------------------------------

std::optional<Failure> topology_oracle(std::string&) {
  for (int width = 2; width <= 10; ++width) {
    for (int height = 2; height <= 10; ++height) {
      const GridConfig grid{width, height};
      for (Rank rank = 1; rank <= grid.sensor_count(); ++rank) {
        const int idx = rank - 1;
        const int row = idx / width;
        const int col = idx % width;
        const auto at = [&](int r, int c) -> std::optional<Rank> {
          if (r < 0 || r >= height || c < 0 || c >= width) return std::nullopt;
          return r * width + c + 1;
        };
        const std::array<std::optional<Rank>, 4> expected{
            at(row, col - 1), at(row, col + 1), at(row - 1, col), at(row + 1, col)};
        const NeighborSet actual = neighbors_of(rank, grid);
        for (int s = 0; s < 4; ++s) {
          if (actual.slots[s] != expected[s]) {
            return Failure{"mismatch at rank " + std::to_string(rank) + " in " +
                           std::to_string(width) + "x" + std::to_string(height)};
          }
        }
      }
    }
  }
  return std::nullopt;
}

// ---- criterion 2: crypto conformance ----------------------------------------

template <std::size_t N>
std::array<std::uint8_t, N> from_hex(const char* hex) {
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    unsigned byte = 0;
    std::sscanf(hex + 2 * i, "%2x", &byte);
    out[i] = static_cast<std::uint8_t>(byte);
  }
  return out;
}

std::optional<Failure> crypto_conformance(std::string& note) {
  // Published CTR-AES192 vectors at rounds = 1.
  const AesKey192 key =
      from_hex<24>("8e73b0f7da0e6452c810f32b809079e562f8ead2522c6b7b");
  const Block16 iv = from_hex<16>("f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff");
  const char* plain[4] = {
      "6bc1bee22e409f96e93d7e117393172a", "ae2d8a571e03ac9c9eb76fac45af8e51",
      "30c81c46a35ce411e5fbc1191a0a52ef", "f69f2445df4f9b17ad2b417be66c3710"};
  const char* cipher[4] = {
      "1abc932417521ca24f2b0459fe7e6e0b", "090339ec0aa6faefd5ccc2c6f4ce8e94",
      "1e36b26bd1ebc670d1bd1d665620abf7", "4f78a7f6d29809585a97daec58c6b050"};
  Frame frame;
  for (int i = 0; i < 4; ++i) {
    const auto block = from_hex<16>(plain[i]);
    frame.insert(frame.end(), block.begin(), block.end());
  }
  CipherConfig single{key, iv, 1};
  xcrypt(frame, single, Serial{});
  for (int i = 0; i < 4; ++i) {
    const auto expect = from_hex<16>(cipher[i]);
    if (!std::equal(expect.begin(), expect.end(), frame.begin() + 16 * i)) {
      return Failure{"rounds=1 xcrypt diverges from the published vectors"};
    }
  }

  // Involution over 1000 random frames per round count.
  std::mt19937_64 rng(0xacce97);
  for (const std::uint32_t rounds : {1u, 2u, 1000u}) {
    for (int i = 0; i < 1000; ++i) {
      CipherConfig c;
      for (auto& b : c.key) b = static_cast<std::uint8_t>(rng());
      for (auto& b : c.iv) b = static_cast<std::uint8_t>(rng());
      c.rounds = rounds;
      Frame original(256);
      for (auto& b : original) b = static_cast<std::uint8_t>(rng());
      Frame work = original;
      xcrypt(work, c, Serial{});
      xcrypt(work, c, Serial{});
      if (work != original) {
        return Failure{"involution failed at rounds=" + std::to_string(rounds)};
      }
    }
  }

  // Mode equivalence on 100 random frames at the full workload.
  for (int i = 0; i < 100; ++i) {
    CipherConfig c;
    for (auto& b : c.key) b = static_cast<std::uint8_t>(rng());
    for (auto& b : c.iv) b = static_cast<std::uint8_t>(rng());
    c.rounds = 1000;
    Frame original(256);
    for (auto& b : original) b = static_cast<std::uint8_t>(rng());
    Frame serial = original;
    Frame st = original;
    Frame dyn = original;
    xcrypt(serial, c, Serial{});
    xcrypt(st, c, Static{4});
    xcrypt(dyn, c, Dynamic{4});
    if (serial != st || serial != dyn) {
      return Failure{"scheduling modes disagree on frame " + std::to_string(i)};
    }
  }
  note = "3000 involutions + 100 mode-equivalence frames";
  return std::nullopt;
}

// ---- criteria 3/4: determinism and accounting -------------------------------

std::uint64_t expected_node_to_node(const SimConfig& config) {
  return static_cast<std::uint64_t>(config.iterations) * 2ull *
         (static_cast<std::uint64_t>(config.height) * (config.width - 1) +
          static_cast<std::uint64_t>(config.width) * (config.height - 1));
}

std::optional<Failure> check_identities(const RunSummary& summary,
                                        const SimConfig& config,
                                        bool full_iterations) {
  const auto sensors = static_cast<std::uint64_t>(config.grid().sensor_count());
  if (summary.total_base_messages != summary.total_events + sensors) {
    return Failure{"base messages != events + terminations"};
  }
  if (summary.total_network_messages !=
      summary.total_node_to_node_messages + summary.total_events + sensors) {
    return Failure{"network total != node-to-node + events + terminations"};
  }
  std::uint64_t per_rank_sum = 0;
  for (const auto count : summary.per_rank_activations) per_rank_sum += count;
  if (per_rank_sum != summary.total_events) {
    return Failure{"per-rank activations do not sum to total events"};
  }
  if (full_iterations &&
      summary.total_node_to_node_messages != expected_node_to_node(config)) {
    return Failure{"node-to-node total != iterations x directed edge count"};
  }
  return std::nullopt;
}

struct DeterminismArtifacts {
  RunSummary summary;
  SimConfig config;
};

DeterminismArtifacts g_det;

std::optional<Failure> determinism(std::string& note) {
  const auto dir_a = scratch_dir("det_a");
  const auto dir_b = scratch_dir("det_b");
  SimConfig config = table_config(2024, dir_a, 8);
  const RunSummary first = run(config);
  config.out_dir = dir_b;
  run(config);
  if (slurp(dir_a / "events.csv").empty()) {
    return Failure{"events.csv missing or empty"};
  }
  if (slurp(dir_a / "events.csv") != slurp(dir_b / "events.csv")) {
    return Failure{"events.csv differs between identical runs"};
  }
  if (slurp(dir_a / "summary.csv") != slurp(dir_b / "summary.csv")) {
    return Failure{"summary.csv differs between identical runs"};
  }
  g_det.summary = first;
  g_det.config = config;
  note = "Table I grid, virtual clock, seed 2024, cipher rounds 8 (full-round "
         "crypto is covered by criterion 2)";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  return std::nullopt;
}

std::optional<Failure> accounting(std::string& note) {
  if (g_det.summary.per_rank_activations.empty()) {
    return Failure{"determinism run unavailable"};
  }
  if (auto failure = check_identities(g_det.summary, g_det.config, true)) {
    return failure;
  }
  if (g_det.summary.total_node_to_node_messages != 6200) {
    return Failure{"expected 6200 node-to-node messages on the 4x5 run"};
  }
  const auto terminations =
      g_det.summary.total_base_messages - g_det.summary.total_events;
  if (terminations != 20) {
    return Failure{"expected 20 termination signals"};
  }
  note = "node-to-node = 62/iteration, terminations = 20; identities also "
         "re-checked on every batch run of criteria 5-7";
  return std::nullopt;
}

// ---- criteria 5/6/7: thirty seeded runs --------------------------------------

struct BatchResults {
  std::uint64_t corner_activations = 0;
  std::uint64_t interior_activations = 0;
  std::uint64_t edge_activations = 0;
  std::vector<std::uint64_t> total_events;
};

BatchResults g_batch;

std::optional<Failure> seeded_batch(std::string& note) {
  const GridConfig grid{4, 5};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto dir = scratch_dir("batch");
    const SimConfig config = table_config(seed, dir, 2);
    const RunSummary summary = run(config);
    if (auto failure = check_identities(summary, config, true)) {
      failure->detail += " (seed " + std::to_string(seed) + ")";
      return failure;
    }
    for (Rank r = 1; r <= grid.sensor_count(); ++r) {
      const auto count = summary.per_rank_activations[r - 1];
      switch (neighbor_count(r, grid)) {
        case 2: g_batch.corner_activations += count; break;
        case 3: g_batch.edge_activations += count; break;
        default: g_batch.interior_activations += count; break;
      }
    }
    g_batch.total_events.push_back(summary.total_events);
    std::filesystem::remove_all(dir);
  }
  note = "30 seeds of the Table I grid, virtual clock, cipher rounds 2";
  return std::nullopt;
}

std::optional<Failure> corner_property(std::string& note) {
  std::string batch_note;
  if (auto failure = seeded_batch(batch_note)) {
    return failure;
  }
  if (g_batch.corner_activations != 0) {
    return Failure{std::to_string(g_batch.corner_activations) +
                   " corner activations observed"};
  }
  note = "0 corner activations; " + batch_note;
  return std::nullopt;
}

std::optional<Failure> interior_dominance(std::string& note) {
  if (g_batch.total_events.empty()) return Failure{"batch unavailable"};
  const double runs = static_cast<double>(g_batch.total_events.size());
  const double interior_mean =
      static_cast<double>(g_batch.interior_activations) / (6.0 * runs);
  const double edge_mean = static_cast<double>(g_batch.edge_activations) / (10.0 * runs);
  std::ostringstream detail;
  detail << "interior mean " << interior_mean << ", edge mean " << edge_mean;
  note = detail.str();
  if (interior_mean < edge_mean) {
    return Failure{"interior nodes fired less often than edge nodes"};
  }
  return std::nullopt;
}

// Independent route for the expected event volume: simulate only the match
// rule on a value grid; no actors, transport or cipher involved.
double monte_carlo_expected_events(int width, int height, int iterations,
                                   std::uint32_t max_random, int trials) {
  std::mt19937_64 rng(0x0bac1e);
  std::uniform_int_distribution<std::uint32_t> draw(0, max_random - 1);
  const int n = width * height;
  std::uint64_t events = 0;
  std::vector<std::uint32_t> current(n);
  std::vector<std::uint32_t> previous(n);
  for (int trial = 0; trial < trials; ++trial) {
    for (int t = 1; t <= iterations; ++t) {
      for (auto& v : current) v = draw(rng);
      for (int idx = 0; idx < n; ++idx) {
        const int row = idx / width;
        const int col = idx % width;
        int matches = 0;
        const auto consider = [&](int r, int c) {
          if (r < 0 || r >= height || c < 0 || c >= width) return;
          const int other = r * width + c;
          if (current[other] == current[idx] ||
              (t > 1 && previous[other] == current[idx])) {
            ++matches;
          }
        };
        consider(row, col - 1);
        consider(row, col + 1);
        consider(row - 1, col);
        consider(row + 1, col);
        if (matches >= 3) ++events;
      }
      std::swap(current, previous);
    }
  }
  return static_cast<double>(events) / trials;
}

std::optional<Failure> event_volume(std::string& note) {
  if (g_batch.total_events.empty()) return Failure{"batch unavailable"};
  double mean = 0.0;
  for (const auto count : g_batch.total_events) mean += static_cast<double>(count);
  mean /= static_cast<double>(g_batch.total_events.size());

  const double expected = monte_carlo_expected_events(4, 5, 100, 12, 400);
  std::ostringstream detail;
  detail << "30-run mean " << mean << ", Monte-Carlo expectation " << expected
         << ", band +/-50%";
  note = detail.str();
  if (mean < 0.5 * expected || mean > 1.5 * expected) {
    return Failure{"mean outside the +/-50% band"};
  }
  return std::nullopt;
}

// ---- criterion 8: scheduling comparison --------------------------------------

double mean_of(const std::vector<TimingSample>& samples, CryptoOp op) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.op == op) {
      sum += s.seconds;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::optional<Failure> scheduling_comparison(std::string& note) {
  const unsigned hardware = std::thread::hardware_concurrency();
  const bool assert_ordering = hardware >= 4;

  const auto root = scratch_dir("sched");
  SimConfig base_config;
  base_config.iterations = assert_ordering ? 10 : 3;
  base_config.interval = 0.0;
  base_config.clock = ClockMode::Real;
  base_config.cipher.rounds = 1000;
  base_config.seed = 99;

  const auto run_mode = [&](const SchedulingMode& mode, const char* name) {
    SimConfig config = base_config;
    config.sched = mode;
    config.out_dir = root / name;
    run(config);
    return config.out_dir;
  };
  const auto serial_dir = run_mode(Serial{}, "serial");
  const auto static_dir = run_mode(Static{4}, "static");
  const auto dynamic_dir = run_mode(Dynamic{4}, "dynamic");

  const SpeedupReport static_report = speedup_report(serial_dir, static_dir);
  const SpeedupReport dynamic_report = speedup_report(serial_dir, dynamic_dir);

  // The report must equal a direct recomputation from the raw CSVs.
  const auto serial_samples = read_run_timings(serial_dir);
  const auto dynamic_samples = read_run_timings(dynamic_dir);
  const double expect_dec_sp = mean_of(serial_samples, CryptoOp::Decrypt) /
                               mean_of(dynamic_samples, CryptoOp::Decrypt);
  if (std::abs(expect_dec_sp - dynamic_report.sp_decryption) >
      1e-9 * std::abs(expect_dec_sp)) {
    return Failure{"report ratios disagree with the raw CSV recomputation"};
  }
  std::filesystem::remove_all(root);

  std::ostringstream detail;
  detail << "decryption speedups: static " << static_report.sp_decryption
         << ", dynamic " << dynamic_report.sp_decryption << "; dynamic encryption "
         << dynamic_report.sp_encryption;
  note = detail.str();
  if (!assert_ordering) {
    g_skip_reason = "host has " + std::to_string(hardware) +
                    " hardware threads (< 4 required by this criterion); report "
                    "pipeline verified, ordering not asserted";
    return std::nullopt;
  }
  if (dynamic_report.sp_decryption <= 1.0) {
    return Failure{"dynamic decryption speedup is not > 1"};
  }
  if (dynamic_report.sp_decryption < static_report.sp_decryption) {
    return Failure{"dynamic decryption speedup below static"};
  }
  return std::nullopt;
}

// ---- criterion 9: backend equivalence ----------------------------------------

std::optional<Failure> transport_equivalence(std::string& note) {
  const auto dir_mem = scratch_dir("mem");
  const auto dir_tcp = scratch_dir("tcp");
  SimConfig config = table_config(512, dir_mem, 8);
  run(config);
  config.out_dir = dir_tcp;
  config.backend = Backend::Tcp;
  config.base_port = 38200;
  run(config);
  const bool same = slurp(dir_mem / "events.csv") == slurp(dir_tcp / "events.csv") &&
                    slurp(dir_mem / "summary.csv") == slurp(dir_tcp / "summary.csv");
  std::filesystem::remove_all(dir_mem);
  std::filesystem::remove_all(dir_tcp);
  if (!same) {
    return Failure{"memory and tcp runs diverge"};
  }
  note = "identical events.csv and summary.csv across backends";
  return std::nullopt;
}

// ---- criterion 10: stop protocol ---------------------------------------------

std::optional<Failure> stop_protocol(std::string& note) {
  const auto dir = scratch_dir("stop");
  const std::string command = g_cli_path +
                              " run --iterations -1 --stdin-stop --clock real"
                              " --interval 0.01 --rounds 2 --seed 11 --out " +
                              dir.string() + " > " + (dir / "stdout.txt").string() +
                              " 2> " + (dir / "stderr.txt").string();
  FILE* child = popen(command.c_str(), "w");
  if (!child) {
    return Failure{"cannot spawn the CLI"};
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(400));
  std::fputs("stop\n", child);
  std::fflush(child);
  const int status = pclose(child);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    return Failure{"CLI exited with status " + std::to_string(status)};
  }
  const RunSummary summary = read_summary_csv(dir / "summary.csv");
  if (summary.total_base_messages - summary.total_events != 20) {
    return Failure{"did not receive 20 termination signals"};
  }
  if (slurp(dir / "stdout.txt").find("Simulation summary") == std::string::npos) {
    return Failure{"summary block missing from CLI output"};
  }
  std::ostringstream detail;
  detail << "clean exit 0 after " << summary.total_node_to_node_messages
         << " node-to-node messages";
  note = detail.str();
  std::filesystem::remove_all(dir);
  return std::nullopt;
}

// ---- criterion 11: trend line vs normal equations ----------------------------

std::optional<Failure> trend_conformance(std::string&) {
  std::mt19937_64 rng(0x12e4d);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SeriesPoint> series;
    const int n = 2 + static_cast<int>(rng() % 80);
    std::int64_t x = 0;
    for (int i = 0; i < n; ++i) {
      x += 1 + static_cast<std::int64_t>(rng() % 4);
      series.push_back(SeriesPoint{x, static_cast<double>(rng() % 1000000) / 4096.0});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : series) {
      const double xd = static_cast<double>(p.iteration);
      sx += xd;
      sy += p.value;
      sxx += xd * xd;
      sxy += xd * p.value;
    }
    const double nn = static_cast<double>(series.size());
    const double det = nn * sxx - sx * sx;
    const double slope = (nn * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;

    const TrendLine line = comm_time_trend(series);
    if (std::abs(line.slope - slope) > 1e-9 ||
        std::abs(line.intercept - intercept) > 1e-9) {
      return Failure{"trend diverges from the normal-equations solution"};
    }
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-wsn-cli>\n");
    return 2;
  }
  g_cli_path = argv[1];

  bool ok = true;
  ok &= run_criterion(1, "topology matches brute-force 2D adjacency",
                      topology_oracle);
  ok &= run_criterion(2, "CTR-AES192 vectors, involution, mode equivalence",
                      crypto_conformance);
  ok &= run_criterion(3, "seeded virtual runs replay byte-identically",
                      determinism);
  ok &= run_criterion(4, "message accounting identities", accounting);
  ok &= run_criterion(5, "corner nodes never detect an event (30 seeds)",
                      corner_property);
  ok &= run_criterion(6, "interior activations dominate edge activations",
                      interior_dominance);
  ok &= run_criterion(7, "event volume sits in the Monte-Carlo band",
                      event_volume);
  ok &= run_criterion(8, "scheduling comparison (real clock)",
                      scheduling_comparison);
  ok &= run_criterion(9, "memory and tcp backends are observationally equal",
                      transport_equivalence);
  ok &= run_criterion(10, "stop command drains into 20 terminations and exit 0",
                      stop_protocol);
  ok &= run_criterion(11, "trend fit matches the normal equations to 1e-9",
                      trend_conformance);

  std::printf("acceptance: %s\n", ok ? "ALL PASS" : "FAILURES PRESENT");
  return ok ? 0 : 1;
}
