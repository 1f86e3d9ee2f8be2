#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scot/metrics.hpp"
#include "scot/simnet.hpp"
#include "scot/workload.hpp"

namespace scot {

inline constexpr int kScenarioSchemaVersion = 1;

struct CongestionSpec {
  BrokerId from;
  BrokerId to;
  double rate = 0;
  Micros at_us = 0;
  std::int64_t backlog = 0;
};

/// A runnable experiment: topology, workload, network parameters, scripted
/// congestion and metric options. See README for the JSON schema.
struct ScenarioConfig {
  std::string name;
  std::string af_path;  // resolved against the config file's directory
  std::string cf_path;
  SimConfig sim;
  Micros max_time_us = 600'000'000;
  std::vector<CongestionSpec> congestion;

  std::optional<WorkloadScript> script;
  std::optional<WorkloadConfig> generate;
  std::optional<BurstConfig> burst;
  std::size_t burst_rate_index = 0;
  /// Sample the queue length of every iLink leaving the HRP's host broker.
  bool watch_hrp_links = false;

  MetricsOptions metrics;

  /// Reseeds every seeded component.
  void set_seed(std::uint64_t seed);
};

/// Parses a scenario document; relative file references resolve against `base_dir`.
/// Throws InvalidConfig / ParseError.
ScenarioConfig parse_scenario(const nlohmann::json& j, const std::string& base_dir);
/// Reads and parses a scenario file. Throws Io when unreadable.
ScenarioConfig load_scenario(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct ScenarioResult {
  RunReport run;
  MetricsReport metrics;
  std::vector<std::string> trace;
  bool time_limit_hit = false;
};

/// Builds the topology from the factor files.
Scot build_topology(const ScenarioConfig& cfg);
/// The workload the scenario runs (script as given, or generated).
WorkloadScript build_workload(const ScenarioConfig& cfg, const Scot& scot);
/// Runs to quiescence. A time-limit overrun returns the partial run with
/// time_limit_hit set instead of throwing.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// "18 brokers, 3 clusters, 6 regions, 15 aLinks, 18 iLinks".
std::string topology_summary(const Scot& scot);
/// Brokers, links (with type) and counts.
nlohmann::json topology_json(const Scot& scot);

/// report.json document: {schema_version, scenario, run, metrics}.
std::string report_document(const ScenarioConfig& cfg, const ScenarioResult& result);

}  // namespace scot
