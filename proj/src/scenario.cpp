#include "scot/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace scot {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

void ScenarioConfig::set_seed(std::uint64_t seed) {
  sim.seed = seed;
  if (generate) generate->seed = seed;
  if (burst) burst->seed = seed;
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& ref) {
  const fs::path p(ref);
  return p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
}

LinkKey link_key(const json& j) {
  return {parse_broker_id(j.at("from").get<std::string>()), parse_broker_id(j.at("to").get<std::string>())};
}

WorkloadConfig parse_generate(const json& j, const std::string& base_dir) {
  WorkloadConfig w;
  w.n_publishers = j.value("n_publishers", w.n_publishers);
  w.n_subscribers = j.value("n_subscribers", w.n_subscribers);
  w.n_symbols = j.value("n_symbols", w.n_symbols);
  w.n_attributes = j.value("n_attributes", w.n_attributes);
  w.selectivity = j.value("selectivity", w.selectivity);
  w.pub_rate = j.value("pub_rate", w.pub_rate);
  w.pubs_per_publisher = j.value("pubs_per_publisher", w.pubs_per_publisher);
  w.adv_style = parse_advertisement_style(j.value("adv_style", std::string(to_string(w.adv_style))));
  w.control_start_us = j.value("control_start_us", w.control_start_us);
  w.control_spacing_us = j.value("control_spacing_us", w.control_spacing_us);
  w.pub_start_us = j.value("pub_start_us", w.pub_start_us);
  w.tolerance = j.value("tolerance", w.tolerance);
  w.calibration_samples = j.value("calibration_samples", w.calibration_samples);
  if (j.contains("basis_csv")) w.basis = parse_basis_csv(read_file(resolve(base_dir, j.at("basis_csv"))));
  return w;
}

BurstConfig parse_burst(const json& j) {
  BurstConfig b;
  b.hrp_total = j.value("hrp_total", b.hrp_total);
  if (j.contains("hrp_rates")) b.hrp_rates = j.at("hrp_rates").get<std::vector<double>>();
  b.matching_fraction = j.value("matching_fraction", b.matching_fraction);
  b.control_at_us = j.value("control_at_us", b.control_at_us);
  b.start_us = j.value("start_us", b.start_us);
  if (j.contains("hrp_host")) b.hrp_host = parse_broker_id(j.at("hrp_host").get<std::string>());
  return b;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j, const std::string& base_dir) {
  try {
    const int version = j.value("schema_version", 0);
    if (version != kScenarioSchemaVersion) {
      throw Error(ErrorCode::InvalidConfig, "unsupported schema_version " + std::to_string(version));
    }
    ScenarioConfig cfg;
    cfg.name = j.value("name", std::string("scenario"));
    const json& topo = j.at("topology");
    cfg.af_path = resolve(base_dir, topo.at("af").get<std::string>());
    cfg.cf_path = resolve(base_dir, topo.at("cf").get<std::string>());
    cfg.sim.mode = parse_routing_mode(j.value("routing_mode", std::string("static")));

    if (j.contains("sim")) {
      const json& s = j.at("sim");
      cfg.sim.window_us = s.value("t_w_us", cfg.sim.window_us);
      cfg.sim.tau = s.value("tau", cfg.sim.tau);
      cfg.sim.default_link.service_rate = s.value("service_rate", cfg.sim.default_link.service_rate);
      cfg.sim.default_link.latency_us = s.value("latency_us", cfg.sim.default_link.latency_us);
      if (s.contains("links")) {
        for (const auto& l : s.at("links")) {
          LinkParams p = cfg.sim.default_link;
          p.service_rate = l.value("service_rate", p.service_rate);
          p.latency_us = l.value("latency_us", p.latency_us);
          cfg.sim.link_overrides[link_key(l)] = p;
        }
      }
      if (s.contains("matching")) {
        cfg.sim.matching.constant_us = s.at("matching").value("constant_us", Micros{0});
        cfg.sim.matching.per_entry_us = s.at("matching").value("per_entry_us", 0.0);
      }
      cfg.sim.path_selection_us = s.value("path_selection_us", cfg.sim.path_selection_us);
      cfg.sim.record_hops = s.value("record_hops", cfg.sim.record_hops);
      cfg.sim.trace = s.value("trace", cfg.sim.trace);
      cfg.max_time_us = s.value("max_time_us", cfg.max_time_us);
    }
    if (j.contains("watch_links")) {
      for (const auto& l : j.at("watch_links")) cfg.sim.watch_links.push_back(link_key(l));
    }
    cfg.watch_hrp_links = j.value("watch_hrp_links", false);

    if (j.contains("congestion")) {
      for (const auto& c : j.at("congestion")) {
        const LinkKey key = link_key(c);
        cfg.congestion.push_back(
            {key.first, key.second, c.at("rate").get<double>(), c.value("at_us", Micros{0}), c.value("backlog", std::int64_t{0})});
      }
    }

    const json& w = j.at("workload");
    if (w.contains("script")) {
      cfg.script = workload_from_json(json::parse(read_file(resolve(base_dir, w.at("script").get<std::string>()))));
    } else if (w.contains("actions")) {
      json doc = w;
      doc["schema_version"] = 1;
      cfg.script = workload_from_json(doc);
    } else if (w.contains("generate")) {
      cfg.generate = parse_generate(w.at("generate"), base_dir);
    } else {
      throw Error(ErrorCode::InvalidConfig, "workload needs 'script', 'actions' or 'generate'");
    }
    if (w.contains("burst")) {
      cfg.burst = parse_burst(w.at("burst"));
      cfg.burst_rate_index = w.at("burst").value("rate_index", std::size_t{0});
      if (cfg.burst_rate_index >= cfg.burst->hrp_rates.size()) {
        throw Error(ErrorCode::InvalidConfig, "burst rate_index out of range");
      }
    }

    if (j.contains("metrics")) {
      cfg.metrics.block_size = j.at("metrics").value("block_size", cfg.metrics.block_size);
      cfg.metrics.threshold_factor = j.at("metrics").value("threshold_factor", cfg.metrics.threshold_factor);
    }
    cfg.set_seed(j.value("seed", std::uint64_t{1}));
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scenario: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return parse_scenario(j, fs::path(path).parent_path().string());
}

Scot build_topology(const ScenarioConfig& cfg) {
  const FactorFile af = load_factor(cfg.af_path);
  const FactorFile cf = load_factor(cfg.cf_path);
  if (af.role != FactorRole::Acyclic) throw Error(ErrorCode::InvalidConfig, cfg.af_path + " is not an af factor");
  if (cf.role != FactorRole::Connectivity) throw Error(ErrorCode::InvalidConfig, cfg.cf_path + " is not a cf factor");
  return Scot::build(af.graph, cf.graph);
}

WorkloadScript build_workload(const ScenarioConfig& cfg, const Scot& scot) {
  WorkloadScript script = cfg.script ? *cfg.script : generate(*cfg.generate, scot);
  if (cfg.burst) script = generate_burst(*cfg.burst, script, scot).at(cfg.burst_rate_index);
  return script;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const Scot scot = build_topology(cfg);
  const WorkloadScript script = build_workload(cfg, scot);

  SimConfig sim = cfg.sim;
  if (cfg.watch_hrp_links) {
    for (const auto& a : script.actions) {
      if (a.client != "HRP") continue;
      for (const auto& peer : scot.neighbours(a.broker).secondary) sim.watch_links.emplace_back(a.broker, peer);
      break;
    }
  }
  SimNet net(scot, sim);
  load_into(script, net);
  for (const auto& c : cfg.congestion) net.inject_congestion(c.from, c.to, c.rate, c.at_us, c.backlog);

  ScenarioResult result;
  try {
    result.run = net.run_until_quiescent(cfg.max_time_us);
  } catch (const TimeLimitExceeded& e) {
    result.run = e.partial();
    result.time_limit_hit = true;
  }
  result.trace = net.trace();
  result.metrics = compute(result.run, cfg.metrics);
  return result;
}

std::string topology_summary(const Scot& scot) {
  std::ostringstream out;
  out << scot.broker_count() << " brokers, " << scot.cluster_count() << " clusters, " << scot.region_count()
      << " regions, " << scot.alink_count() << " aLinks, " << scot.ilink_count() << " iLinks";
  return out.str();
}

json topology_json(const Scot& scot) {
  json brokers = json::array();
  for (const auto& b : scot.brokers()) {
    brokers.push_back({{"id", to_string(b)}, {"edge", scot.is_edge_broker(b)}});
  }
  json links = json::array();
  for (const auto& [a, b] : scot.product().edges()) {
    links.push_back({{"a", to_string(a)}, {"b", to_string(b)}, {"type", std::string(to_string(scot.link_type(a, b)))}});
  }
  return {{"brokers", brokers},
          {"links", links},
          {"counts",
           {{"brokers", scot.broker_count()},
            {"clusters", scot.cluster_count()},
            {"regions", scot.region_count()},
            {"alinks", scot.alink_count()},
            {"ilinks", scot.ilink_count()},
            {"af_diameter", scot.af_diameter()}}}};
}

std::string report_document(const ScenarioConfig& cfg, const ScenarioResult& result) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["scenario"] = cfg.name;
  doc["time_limit_hit"] = result.time_limit_hit;
  doc["run"] = to_json_value(result.run);
  doc["metrics"] = to_json_value(result.metrics);
  return doc.dump(2) + "\n";
}

}  // namespace scot
