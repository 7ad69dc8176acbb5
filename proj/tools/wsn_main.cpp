#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "wsn/analysis.hpp"
#include "wsn/base.hpp"
#include "wsn/errors.hpp"
#include "wsn/sim.hpp"
#include "wsn/util.hpp"

namespace {

struct SimFlags {
  wsn::SimConfig cfg;
  std::string sched = "serial";
  unsigned workers = 4;
  std::string clock = "real";
  std::string backend = "memory";
  std::string out = "wsn_out";
  std::string key_file;
  std::string config_file;
  std::map<std::string, CLI::Option*> opts;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file,
                    "Config file with key = value lines; flags override it");
    opts["width"] = cmd->add_option("--width", cfg.width, "Grid columns")
                        ->capture_default_str();
    opts["height"] =
        cmd->add_option("--height", cfg.height, "Grid rows")->capture_default_str();
    opts["iterations"] = cmd->add_option("--iterations", cfg.iterations,
                                         "Iterations to run; -1 runs until 'stop'")
                             ->capture_default_str();
    opts["interval"] =
        cmd->add_option("--interval", cfg.interval, "Seconds between iterations")
            ->capture_default_str();
    opts["max_random"] = cmd->add_option("--max-random", cfg.max_random,
                                         "Values are drawn from [0, max-random)")
                             ->capture_default_str();
    opts["packsize"] = cmd->add_option("--packsize", cfg.packsize,
                                       "Frame size in bytes")
                           ->capture_default_str();
    opts["sched"] = cmd->add_option("--sched", sched,
                                    "Cipher scheduling: serial, static or dynamic")
                        ->capture_default_str();
    opts["workers"] = cmd->add_option("--workers", workers,
                                      "Workers for static/dynamic scheduling")
                          ->capture_default_str();
    opts["seed"] = cmd->add_option("--seed", cfg.seed, "Master seed")
                       ->capture_default_str();
    opts["clock"] = cmd->add_option("--clock", clock, "Clock mode: real or virtual")
                        ->capture_default_str();
    opts["backend"] = cmd->add_option("--backend", backend,
                                      "Transport backend: memory or tcp")
                          ->capture_default_str();
    opts["base_port"] = cmd->add_option("--base-port", cfg.base_port,
                                        "First TCP port (rank 0)")
                            ->capture_default_str();
    opts["rounds"] = cmd->add_option("--rounds", cfg.cipher.rounds,
                                     "Cipher passes per 16-byte chunk")
                         ->capture_default_str();
    opts["out"] = cmd->add_option("--out", out, "Output directory for run logs")
                      ->envname("WSN_OUT_DIR")
                      ->capture_default_str();
    opts["key_file"] = cmd->add_option(
        "--key-file", key_file, "40-byte key file: 24-byte AES-192 key + 16-byte IV");
    opts["stdin_stop"] = cmd->add_flag("--stdin-stop", cfg.stdin_stop,
                                       "Watch standard input for the 'stop' command");
  }

  // Config-file values apply wherever the flag was not given on the command
  // line; run_config.txt from a previous run is accepted directly.
  void overlay_config_file() {
    if (config_file.empty()) return;
    const auto kv = wsn::read_config_map(config_file);
    const auto file_value = [&](const char* key) -> const std::string* {
      if (opts.at(key)->count() > 0) return nullptr;  // flag wins
      const auto it = kv.find(key);
      return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = file_value("width")) cfg.width = std::stoi(*v);
    if (const auto* v = file_value("height")) cfg.height = std::stoi(*v);
    if (const auto* v = file_value("iterations")) cfg.iterations = std::stoll(*v);
    if (const auto* v = file_value("interval")) cfg.interval = std::stod(*v);
    if (const auto* v = file_value("max_random")) {
      cfg.max_random = static_cast<std::uint32_t>(std::stoul(*v));
    }
    if (const auto* v = file_value("packsize")) {
      cfg.packsize = static_cast<std::size_t>(std::stoul(*v));
    }
    if (const auto* v = file_value("seed")) cfg.seed = std::stoull(*v);
    if (const auto* v = file_value("clock")) clock = *v;
    if (const auto* v = file_value("backend")) backend = *v;
    if (const auto* v = file_value("base_port")) {
      cfg.base_port = static_cast<std::uint16_t>(std::stoul(*v));
    }
    if (const auto* v = file_value("rounds")) {
      cfg.cipher.rounds = static_cast<std::uint32_t>(std::stoul(*v));
    }
    if (const auto* v = file_value("out")) out = *v;
    if (const auto* v = file_value("key_file")) key_file = *v;
    if (const auto* v = file_value("stdin_stop")) {
      cfg.stdin_stop = (*v == "1" || *v == "true");
    }
    // sched carries its worker count as "dynamic:4"; explicit --sched or
    // --workers takes the command-line pair instead.
    if (const auto* v = file_value("sched")) {
      if (opts.at("workers")->count() == 0) {
        cfg.sched = wsn::parse_sched_value(*v);
        sched.clear();  // marker: cfg.sched already final
      }
    }
  }

  wsn::SimConfig build() {
    overlay_config_file();
    if (!sched.empty()) {
      cfg.sched = wsn::parse_scheduling_mode(sched, workers);
    }
    cfg.clock = wsn::parse_clock_mode(clock);
    cfg.backend = wsn::parse_backend(backend);
    cfg.out_dir = out;
    if (!key_file.empty()) {
      wsn::load_key_file(key_file, cfg.cipher);
    }
    cfg.validate();
    return cfg;
  }
};

int cmd_run(SimFlags& flags) {
  const wsn::SimConfig cfg = flags.build();
  const wsn::RunSummary summary = wsn::run(cfg);
  wsn::write_summary_block(std::cout, summary);
  std::cout << "logs written to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_topology(int width, int height) {
  const wsn::GridConfig grid{width, height};
  wsn::validate_layout(grid, grid.process_count());
  std::cout << width << " x " << height << " grid, " << grid.process_count()
            << " processes (base station = rank 0)\n\n";
  const int cell = static_cast<int>(std::to_string(grid.sensor_count()).size()) + 1;
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      std::cout << std::setw(cell) << (row * width + col + 1);
    }
    std::cout << '\n';
  }
  std::cout << '\n';
  for (wsn::Rank r = 1; r <= grid.sensor_count(); ++r) {
    const auto pos = wsn::position_of(r, grid);
    const auto neighbors = wsn::neighbors_of(r, grid);
    std::cout << "rank " << r << " (row " << pos.row << ", col " << pos.col << "):";
    for (int s = 0; s < 4; ++s) {
      std::cout << ' ' << wsn::kNeighborSlotNames[s] << ' ';
      if (neighbors.slots[s]) {
        std::cout << *neighbors.slots[s];
      } else {
        std::cout << '-';
      }
      if (s < 3) std::cout << ',';
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_analyze(const std::string& dir) {
  const std::filesystem::path run_dir(dir);
  const wsn::RunAnalysis analysis = wsn::analyze_run(run_dir);
  wsn::write_analysis_outputs(analysis, run_dir);

  std::cout << "events: " << analysis.summary.total_events << '\n';
  std::int64_t peak_iter = 0;
  double peak = 0.0;
  for (const auto& p : analysis.messages) {
    if (p.value > peak) {
      peak = p.value;
      peak_iter = p.iteration;
    }
  }
  if (peak > 0) {
    std::cout << "peak messages per iteration: " << static_cast<std::uint64_t>(peak)
              << " at iteration " << peak_iter << '\n';
  }
  if (analysis.has_trend) {
    std::cout << "comm-time trend: slope " << wsn::fixed9(analysis.trend.slope)
              << " s/iteration, intercept " << wsn::fixed9(analysis.trend.intercept)
              << " s\n";
  }
  std::cout << "activation grid (row 0 first):\n";
  for (const auto& row : analysis.grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::cout << (c ? " " : "") << row[c];
    }
    std::cout << '\n';
  }
  std::cout << "wrote series_messages.csv, series_commtime.csv, activation_grid.csv\n";
  return 0;
}

int cmd_compare_sched(SimFlags& flags) {
  wsn::SimConfig base_cfg = flags.build();
  if (base_cfg.clock != wsn::ClockMode::Real) {
    throw wsn::ConfigError("compare-sched measures wall time; use --clock real");
  }
  const std::filesystem::path out_root = base_cfg.out_dir;

  const auto run_one = [&](const wsn::SchedulingMode& mode, const char* name) {
    wsn::SimConfig cfg = base_cfg;
    cfg.sched = mode;
    cfg.out_dir = out_root / name;
    std::cout << "running " << name << "...\n";
    wsn::run(cfg);
    return cfg.out_dir;
  };

  const auto serial_dir = run_one(wsn::Serial{}, "serial");
  const auto static_dir = run_one(wsn::Static{flags.workers}, "static");
  const auto dynamic_dir = run_one(wsn::Dynamic{flags.workers}, "dynamic");

  const std::array<wsn::SpeedupReport, 2> reports = {
      wsn::speedup_report(serial_dir, static_dir),
      wsn::speedup_report(serial_dir, dynamic_dir)};

  std::ofstream csv(out_root / "speedup_report.csv");
  csv << "mode,at_enc_serial_s,at_enc_parallel_s,sp_encryption,at_dec_serial_s,"
         "at_dec_parallel_s,sp_decryption,at_total_serial_s,at_total_parallel_s,"
         "sp_total\n";
  for (const auto& r : reports) {
    csv << r.mode_label << ',' << wsn::fixed9(r.at_enc_serial) << ','
        << wsn::fixed9(r.at_enc_parallel) << ',' << wsn::fixed9(r.sp_encryption) << ','
        << wsn::fixed9(r.at_dec_serial) << ',' << wsn::fixed9(r.at_dec_parallel) << ','
        << wsn::fixed9(r.sp_decryption) << ',' << wsn::fixed9(r.at_total_serial) << ','
        << wsn::fixed9(r.at_total_parallel) << ',' << wsn::fixed9(r.sp_total) << '\n';

    std::cout << r.mode_label << ": encryption speedup " << wsn::fixed9(r.sp_encryption)
              << ", decryption speedup " << wsn::fixed9(r.sp_decryption)
              << ", total speedup " << wsn::fixed9(r.sp_total) << '\n';
  }
  std::cout << "wrote " << (out_root / "speedup_report.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-based wireless sensor network simulator"};
  app.require_subcommand(1);

  SimFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_flags.add_to(run_cmd);

  int topo_width = 4;
  int topo_height = 5;
  CLI::App* topo_cmd =
      app.add_subcommand("topology", "Print the grid and each rank's neighbors");
  topo_cmd->add_option("--width", topo_width, "Grid columns")->capture_default_str();
  topo_cmd->add_option("--height", topo_height, "Grid rows")->capture_default_str();

  std::string analyze_dir = "wsn_out";
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Compute metrics from a run directory");
  analyze_cmd->add_option("--out", analyze_dir, "Run directory to analyze")
      ->envname("WSN_OUT_DIR")
      ->capture_default_str();

  SimFlags cmp_flags;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare-sched", "Run serial, static and dynamic simulations and "
                       "report the scheduling speedups");
  cmp_flags.add_to(cmp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (topo_cmd->parsed()) return cmd_topology(topo_width, topo_height);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_dir);
    if (cmp_cmd->parsed()) return cmd_compare_sched(cmp_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
