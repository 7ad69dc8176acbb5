#include "wsn/config.hpp"

#include <fstream>
#include <map>

#include "wsn/errors.hpp"
#include "wsn/util.hpp"

namespace wsn {

void SimConfig::validate() const {
  validate_layout(grid(), grid().process_count());
  if (iterations < -1) {
    throw ConfigError("iterations must be positive, zero, or -1 for unbounded");
  }
  if (interval < 0) {
    throw ConfigError("interval must be >= 0");
  }
  if (max_random < 2) {
    throw ConfigError("max_random must be >= 2");
  }
  if (!valid_packsize(packsize)) {
    throw ConfigError("packsize " + std::to_string(packsize) +
                      " must be >= 64 and a multiple of 16");
  }
  if (cipher.rounds < 1) {
    throw ConfigError("cipher rounds must be >= 1");
  }
  if (backend == Backend::Tcp) {
    const long max_port = static_cast<long>(base_port) + grid().process_count();
    if (base_port == 0 || max_port > 65535) {
      throw ConfigError("base_port " + std::to_string(base_port) +
                        " leaves no room for " +
                        std::to_string(grid().process_count()) + " ports");
    }
  }
}

void load_key_file(const std::filesystem::path& path, CipherConfig& cipher) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open key file " + path.string());
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() != 40) {
    throw ConfigError("key file " + path.string() + " must be exactly 40 bytes (24" +
                      "-byte key + 16-byte iv), got " + std::to_string(bytes.size()));
  }
  for (int i = 0; i < 24; ++i) cipher.key[i] = static_cast<std::uint8_t>(bytes[i]);
  for (int i = 0; i < 16; ++i) cipher.iv[i] = static_cast<std::uint8_t>(bytes[24 + i]);
}

void write_run_config(const SimConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << "width = " << config.width << "\n";
  out << "height = " << config.height << "\n";
  out << "iterations = " << config.iterations << "\n";
  out << "interval = " << fixed9(config.interval) << "\n";
  out << "max_random = " << config.max_random << "\n";
  out << "packsize = " << config.packsize << "\n";
  out << "sched = " << to_string(config.sched) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "clock = " << to_string(config.clock) << "\n";
  out << "backend = " << to_string(config.backend) << "\n";
  out << "base_port = " << config.base_port << "\n";
  out << "rounds = " << config.cipher.rounds << "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SchedulingMode parse_sched_value(const std::string& value) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) {
    return parse_scheduling_mode(value, 1);
  }
  return parse_scheduling_mode(value.substr(0, colon),
                               static_cast<unsigned>(std::stoul(value.substr(colon + 1))));
}

std::map<std::string, std::string> read_config_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("malformed line in " + path.string() + ": " + line);
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

SimConfig read_run_config(const std::filesystem::path& path) {
  const std::map<std::string, std::string> kv = read_config_map(path);

  SimConfig config;
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ConfigError(path.string() + " is missing key '" + std::string(key) + "'");
    }
    return it->second;
  };
  config.width = std::stoi(get("width"));
  config.height = std::stoi(get("height"));
  config.iterations = std::stoll(get("iterations"));
  config.interval = std::stod(get("interval"));
  config.max_random = static_cast<std::uint32_t>(std::stoul(get("max_random")));
  config.packsize = static_cast<std::size_t>(std::stoul(get("packsize")));
  config.sched = parse_sched_value(get("sched"));
  config.seed = std::stoull(get("seed"));
  config.clock = parse_clock_mode(get("clock"));
  config.backend = parse_backend(get("backend"));
  config.base_port = static_cast<std::uint16_t>(std::stoul(get("base_port")));
  config.cipher.rounds = static_cast<std::uint32_t>(std::stoul(get("rounds")));
  config.out_dir = path.parent_path();
  return config;
}

}  // namespace wsn
