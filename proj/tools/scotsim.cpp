// scotsim: build and check overlay topologies, generate workloads, run
// scenarios and compare their metrics.
//
// Exit codes: 0 success, 2 validation failure, 3 time limit, 4 I/O.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scot/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kTimeLimit = 3;
constexpr int kIo = 4;

int exit_code_for(const scot::Error& e) {
  switch (e.code()) {
    case scot::ErrorCode::Io: return kIo;
    case scot::ErrorCode::TimeLimitExceeded: return kTimeLimit;
    default: return kValidation;
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw scot::Error(scot::ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> tau;
  std::optional<std::int64_t> tw;
  bool trace = false;

  void apply(scot::ScenarioConfig& cfg) const {
    if (seed) cfg.set_seed(*seed);
    if (mode) cfg.sim.mode = scot::parse_routing_mode(*mode);
    if (tau) cfg.sim.tau = *tau;
    if (tw) cfg.sim.window_us = *tw;
    if (trace) cfg.sim.trace = true;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Seed for workload generation and the run");
  cmd->add_option("--mode", o.mode, "Routing mode")->check(CLI::IsMember({"static", "dynamic"}));
  cmd->add_option("--tau", o.tau, "Congestion threshold");
  cmd->add_option("--tw", o.tw, "Congestion window in microseconds");
}

int cmd_topology(const std::string& action, const std::string& af_path, const std::string& cf_path,
                 const std::optional<std::string>& out) {
  const scot::FactorFile af = scot::load_factor(af_path);
  const scot::FactorFile cf = scot::load_factor(cf_path);
  const scot::ValidationReport report = scot::validate_scot_factors(af.graph, cf.graph);
  if (!report.valid()) {
    std::cerr << "invalid factors: " << report.summary() << "\n";
    return kValidation;
  }
  const scot::Scot scot = scot::Scot::build(af.graph, cf.graph);
  std::cout << scot::topology_summary(scot) << "\n";
  if (action == "build" && out) {
    ensure_dir(*out);
    scot::write_file((fs::path(*out) / "topology.json").string(), scot::topology_json(scot).dump(2) + "\n");
  }
  return kOk;
}

int cmd_workload_gen(const std::string& scenario_path, const Overrides& o, const std::string& out) {
  scot::ScenarioConfig cfg = scot::load_scenario(scenario_path);
  o.apply(cfg);
  const scot::Scot scot = scot::build_topology(cfg);
  const scot::WorkloadScript script = scot::build_workload(cfg, scot);
  ensure_dir(out);
  scot::write_file((fs::path(out) / "workload.json").string(), scot::to_json(script));
  std::cout << script.actions.size() << " actions, selectivity " << scot::measured_selectivity(script) << "\n";
  return kOk;
}

int cmd_run(const std::string& scenario_path, const Overrides& o, const std::string& out) {
  scot::ScenarioConfig cfg = scot::load_scenario(scenario_path);
  o.apply(cfg);
  const scot::ScenarioResult result = scot::run_scenario(cfg);
  ensure_dir(out);
  const fs::path dir(out);
  scot::write_file((dir / "report.json").string(), scot::report_document(cfg, result));
  scot::write_file((dir / "metrics.csv").string(), scot::metrics_csv(result.metrics, cfg.name));
  std::string trace;
  for (const auto& line : result.trace) trace += line + "\n";
  scot::write_file((dir / "trace.log").string(), trace);

  std::cout << cfg.name << ": " << result.run.deliveries.size() << " deliveries, "
            << result.metrics.im_total << " inter-broker messages (routing "
            << result.metrics.im_counts.at("routing") << ")\n";
  if (result.time_limit_hit) {
    std::cerr << "time limit of " << cfg.max_time_us << "us reached before quiescence\n";
    return kTimeLimit;
  }
  return kOk;
}

scot::MetricsReport load_metrics(const std::string& path) {
  const fs::path p = fs::is_directory(path) ? fs::path(path) / "report.json" : fs::path(path);
  json doc;
  try {
    doc = json::parse(scot::read_file(p.string()));
  } catch (const json::exception& e) {
    throw scot::Error(scot::ErrorCode::ParseError, p.string() + ": " + e.what());
  }
  return scot::metrics_from_json(doc.contains("metrics") ? doc.at("metrics") : doc);
}

int cmd_compare(const std::vector<std::string>& inputs, const std::optional<std::string>& out) {
  const scot::MetricsReport base = load_metrics(inputs.front());
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    const scot::ComparisonTable table = scot::compare(base, load_metrics(inputs[i]));
    std::cout << "# " << inputs.front() << " vs " << inputs[i] << "\n" << scot::comparison_csv(table);
    const auto* stab = table.find("stabilization_time_us");
    if (stab) {
      std::cout << "stabilization: " << (stab->b <= stab->a ? "b <= a" : "b > a") << "\n";
    }
    if (out) {
      ensure_dir(*out);
      const std::string suffix = inputs.size() > 2 ? "_" + std::to_string(i) : "";
      scot::write_file((fs::path(*out) / ("comparison" + suffix + ".csv")).string(), scot::comparison_csv(table));
      scot::write_file((fs::path(*out) / ("comparison" + suffix + ".json")).string(),
                       scot::to_json_value(table).dump(2) + "\n");
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured cyclic overlay pub/sub simulator"};
  app.require_subcommand(1);

  auto* topology = app.add_subcommand("topology", "Build or check a topology from factor files");
  std::string topo_action;
  std::string af_path;
  std::string cf_path;
  std::optional<std::string> topo_out;
  topology->add_option("action", topo_action, "build | check")->required()->check(CLI::IsMember({"build", "check"}));
  topology->add_option("--af", af_path, "Acyclic factor file")->required();
  topology->add_option("--cf", cf_path, "Connectivity factor file")->required();
  topology->add_option("--out", topo_out, "Output directory for topology.json");

  auto* workload = app.add_subcommand("workload", "Workload tools");
  auto* gen = workload->add_subcommand("gen", "Generate the workload script of a scenario");
  workload->require_subcommand(1);
  std::string gen_scenario;
  std::string gen_out = ".";
  Overrides gen_overrides;
  gen->add_option("scenario", gen_scenario, "Scenario JSON file")->required();
  gen->add_option("--out", gen_out, "Output directory");
  add_overrides(gen, gen_overrides);

  auto* run = app.add_subcommand("run", "Run a scenario");
  std::string run_scenario;
  std::string run_out = ".";
  Overrides run_overrides;
  run->add_option("scenario", run_scenario, "Scenario JSON file")->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_flag("--trace", run_overrides.trace, "Write the per-event trace to trace.log");
  add_overrides(run, run_overrides);

  auto* cmp = app.add_subcommand("compare", "Compare metrics of two or more runs");
  std::vector<std::string> cmp_inputs;
  std::optional<std::string> cmp_out;
  cmp->add_option("reports", cmp_inputs, "report.json files or run directories")->required()->expected(2, -1);
  cmp->add_option("--out", cmp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kValidation;
  }

  try {
    if (*topology) return cmd_topology(topo_action, af_path, cf_path, topo_out);
    if (*gen) return cmd_workload_gen(gen_scenario, gen_overrides, gen_out);
    if (*run) return cmd_run(run_scenario, run_overrides, run_out);
    if (*cmp) return cmd_compare(cmp_inputs, cmp_out);
  } catch (const scot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
