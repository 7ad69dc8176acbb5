#include "wsn/sim.hpp"

#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "wsn/errors.hpp"
#include "wsn/node.hpp"

namespace wsn {

std::uint64_t derive_node_seed(std::uint64_t master_seed, Rank rank) {
  // splitmix64 finalizer over the seed offset by a per-rank golden-ratio step.
  std::uint64_t z =
      master_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(rank) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RunSummary run(const SimConfig& config) {
  config.validate();
  const std::size_t chunks = config.packsize / CipherConfig::kChunkSize;
  if (!keystream_nonzero(config.cipher, chunks)) {
    throw ConfigError("cipher self-check failed: keystream is all zero");
  }
  std::filesystem::create_directories(config.out_dir);
  write_run_config(config, config.out_dir / "run_config.txt");

  std::shared_ptr<Transport> transport = make_transport(TransportConfig{
      config.backend, config.grid().process_count(), config.packsize,
      config.base_port});
  const RunClock run_clock;
  const ActorEnv env{config, *transport, &run_clock};

  std::mutex failure_mu;
  std::string first_failure;
  const auto record_failure = [&](Rank rank, const char* what) {
    std::lock_guard lock(failure_mu);
    if (first_failure.empty()) {
      first_failure = "rank " + std::to_string(rank) + ": " + what;
    }
    // Unblock every actor; the run cannot complete once an actor died.
    transport->close();
  };

  std::vector<std::thread> nodes;
  nodes.reserve(config.grid().sensor_count());
  for (Rank rank = 1; rank <= config.grid().sensor_count(); ++rank) {
    nodes.emplace_back([&, rank] {
      try {
        node_run(rank, env);
      } catch (const std::exception& e) {
        record_failure(rank, e.what());
      }
    });
  }

  auto listener_cancelled = std::make_shared<std::atomic<bool>>(false);
  if (config.stdin_stop && config.iterations < 0) {
    // Detached on purpose: getline may never return. The thread shares
    // ownership of the transport and checks the cancel flag before acting.
    std::thread([transport, cancelled = listener_cancelled, config] {
      stop_listener(std::cin, transport, config, cancelled.get());
    }).detach();
  }

  RunSummary summary;
  std::string base_failure;
  try {
    summary = base_run(env);
  } catch (const std::exception& e) {
    base_failure = e.what();
    transport->close();
  }

  for (auto& t : nodes) t.join();
  listener_cancelled->store(true);
  transport->close();

  if (!first_failure.empty()) {
    throw Error("simulation aborted, " + first_failure);
  }
  if (!base_failure.empty()) {
    throw Error("simulation aborted, base station: " + base_failure);
  }
  return summary;
}

}  // namespace wsn
