#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "scot/scenario.hpp"

using namespace scot;
using namespace scot::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_scenario() {
  return json::parse(R"({
    "schema_version": 1,
    "name": "mini",
    "topology": {"af": "six_region_af.txt", "cf": "triangle_cf.txt"},
    "workload": {"actions": []}
  })");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("scotsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Runs the CLI; returns its exit status and captured stdout.
std::pair<int, std::string> scotsim(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string(SCOTSIM_PATH) + " " + args + " > " + out.string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), read_file(out.string())};
}

std::set<std::string> receivers(const RunReport& r, const std::string& pub_prefix) {
  std::set<std::string> out;
  for (const auto& d : r.deliveries) {
    if (d.pub.rfind(pub_prefix, 0) == 0) out.insert(d.subscriber);
  }
  return out;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("minimal scenario parses with defaults") {
    const ScenarioConfig cfg = parse_scenario(minimal_scenario(), SCOT_SCENARIO_DIR);
    CHECK(cfg.name == "mini");
    CHECK(cfg.sim.window_us == 50'000);
    CHECK(cfg.sim.tau == 10.0);
    CHECK(cfg.sim.mode == RoutingMode::Static);
    CHECK(cfg.script.has_value());
    CHECK(build_topology(cfg).broker_count() == 18);
  }

  TEST_CASE("scenario errors are classified") {
    auto code_of = [](const json& j) {
      try {
        parse_scenario(j, SCOT_SCENARIO_DIR);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::Io;  // sentinel: nothing thrown
    };
    json j = minimal_scenario();
    j["schema_version"] = 7;
    CHECK(code_of(j) == ErrorCode::InvalidConfig);
    j = minimal_scenario();
    j.erase("topology");
    CHECK(code_of(j) == ErrorCode::ParseError);
    j = minimal_scenario();
    j["workload"] = json::object();
    CHECK(code_of(j) == ErrorCode::InvalidConfig);
    j = minimal_scenario();
    j["routing_mode"] = "fastest";
    CHECK(code_of(j) == ErrorCode::InvalidConfig);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
  }

  TEST_CASE("six-region example delivers to exactly the interested subscribers") {
    const ScenarioResult r = run_scenario(load_scenario(scenario_path("six_region.json")));
    CHECK(r.run.quiescent);
    CHECK(receivers(r.run, "P0:") == std::set<std::string>{"S1", "S2"});
    CHECK(receivers(r.run, "P1:") == std::set<std::string>{"S", "S0", "S1", "S2"});
    CHECK(receivers(r.run, "P2:") == std::set<std::string>{"S2"});
    CHECK(r.run.duplicate_handling == 0);
    CHECK(r.run.errors.empty());
  }

  TEST_CASE("congestion cases reproduce message counts and vectors") {
    struct Expect {
      const char* file;
      std::uint64_t dynamic;
      std::uint64_t fixed;
      std::vector<std::pair<std::string, std::string>> civs;  // link, vector
    };
    const std::vector<Expect> cases = {
        {"case1.json", 7, 8, {{"B(b,3)->B(b,1)", "0001"}, {"B(b,1)->B(c,1)", "0001"}}},
        {"case2.json", 6, 7, {{"B(b,3)->B(c,3)", "0101"}}},
        {"case3.json", 8, 7, {{"B(b,3)->B(b,2)", "0011"}, {"B(b,2)->B(b,0)", "0010"}, {"B(b,0)->B(a,0)", "0010"}}},
    };
    for (const auto& c : cases) {
      CAPTURE(c.file);
      ScenarioConfig cfg = load_scenario(scenario_path(c.file));
      const ScenarioResult dyn = run_scenario(cfg);
      cfg.sim.mode = RoutingMode::Static;
      const ScenarioResult spr = run_scenario(cfg);
      CHECK(dyn.run.im_counts.at("routing") == c.dynamic);
      CHECK(spr.run.im_counts.at("routing") == c.fixed);
      CHECK(dyn.run.duplicate_handling == 0);
      std::vector<std::pair<std::string, std::string>> seen;
      for (const auto& h : dyn.run.hops) {
        if (h.kind == MessageKind::Pub && !h.civ.empty()) seen.emplace_back(link_name(h.from, h.to), h.civ);
      }
      CHECK(seen == c.civs);
      CHECK(receivers(dyn.run, "P:") == receivers(spr.run, "P:"));
    }
  }

  TEST_CASE("seed override changes generated workloads only through the seed") {
    json j = minimal_scenario();
    j["workload"] = json::parse(R"({"generate": {"n_publishers": 3, "n_subscribers": 30, "pubs_per_publisher": 2}})");
    ScenarioConfig a = parse_scenario(j, SCOT_SCENARIO_DIR);
    ScenarioConfig b = parse_scenario(j, SCOT_SCENARIO_DIR);
    CHECK(report_document(a, run_scenario(a)) == report_document(b, run_scenario(b)));
    b.set_seed(99);
    CHECK(to_json(build_workload(a, build_topology(a))) != to_json(build_workload(b, build_topology(b))));
  }

  TEST_CASE("time limit overrun is flagged, not thrown") {
    ScenarioConfig cfg = load_scenario(scenario_path("case1.json"));
    cfg.max_time_us = 200'000;
    const ScenarioResult r = run_scenario(cfg);
    CHECK(r.time_limit_hit);
    CHECK_FALSE(r.run.quiescent);
  }

  TEST_CASE("topology summary text") {
    const Scot s = Scot::build(six_region_af(), complete_graph(3));
    CHECK(topology_summary(s) == "18 brokers, 3 clusters, 6 regions, 15 aLinks, 18 iLinks");
    const json t = topology_json(s);
    CHECK(t.at("brokers").size() == 18);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("topology check prints counts and rejects bad factors") {
    const fs::path dir = scratch_dir("topology");
    const std::string sc = SCOT_SCENARIO_DIR;
    auto [rc, out] = scotsim("topology check --af " + sc + "/six_region_af.txt --cf " + sc + "/triangle_cf.txt", dir);
    CHECK(rc == 0);
    CHECK(out == "18 brokers, 3 clusters, 6 regions, 15 aLinks, 18 iLinks\n");

    std::tie(rc, out) = scotsim("topology build --af " + sc + "/path3_af.txt --cf " + sc + "/k4_cf.txt --out " +
                                    dir.string(), dir);
    CHECK(rc == 0);
    CHECK(out == "12 brokers, 4 clusters, 3 regions, 8 aLinks, 18 iLinks\n");
    CHECK(fs::exists(dir / "topology.json"));

    std::tie(rc, out) = scotsim("topology check --af " + sc + "/six_region_af.txt --cf " + sc + "/square_cf_invalid.txt", dir);
    CHECK(rc == 2);
    CHECK(read_file((dir / "stderr.txt").string()).find("ConnectivityViolation") != std::string::npos);

    std::tie(rc, out) = scotsim("topology check --af /nonexistent --cf " + sc + "/k4_cf.txt", dir);
    CHECK(rc == 4);
  }

  TEST_CASE("run writes report, metrics and trace; compare reads them back") {
    const fs::path dir = scratch_dir("run");
    const std::string sc = SCOT_SCENARIO_DIR;
    auto [rc, out] = scotsim("run " + sc + "/case1.json --out " + (dir / "idr").string() + " --trace", dir);
    CHECK(rc == 0);
    for (const char* f : {"report.json", "metrics.csv", "trace.log"}) CHECK(fs::exists(dir / "idr" / f));
    CHECK_FALSE(read_file((dir / "idr" / "trace.log").string()).empty());
    const json doc = json::parse(read_file((dir / "idr" / "report.json").string()));
    CHECK(doc.at("schema_version") == 1);
    CHECK(doc.at("metrics").contains("im_counts"));

    std::tie(rc, out) = scotsim("run " + sc + "/case1.json --mode static --out " + (dir / "spr").string(), dir);
    CHECK(rc == 0);
    std::tie(rc, out) = scotsim("compare " + (dir / "spr").string() + " " + (dir / "idr").string() + " --out " +
                                    dir.string(), dir);
    CHECK(rc == 0);
    CHECK(out.find("im_routing,8,7,-1,") != std::string::npos);
    CHECK(fs::exists(dir / "comparison.csv"));

    std::tie(rc, out) = scotsim("compare " + (dir / "idr").string() + " " + (dir / "nothing").string(), dir);
    CHECK(rc == 4);
  }

  TEST_CASE("exit codes for usage errors, time limits and generation") {
    const fs::path dir = scratch_dir("codes");
    const std::string sc = SCOT_SCENARIO_DIR;
    CHECK(scotsim("frobnicate", dir).first == 2);
    CHECK(scotsim("run " + sc + "/case1.json --mode sideways", dir).first == 2);

    json j = json::parse(read_file(sc + "/case1.json"));
    j["sim"]["max_time_us"] = 200'000;
    j["topology"]["af"] = sc + "/path3_af.txt";
    j["topology"]["cf"] = sc + "/k4_cf.txt";
    write_file((dir / "short.json").string(), j.dump());
    CHECK(scotsim("run " + (dir / "short.json").string() + " --out " + dir.string(), dir).first == 3);

    json g = minimal_scenario();
    g["topology"]["af"] = sc + "/six_region_af.txt";
    g["topology"]["cf"] = sc + "/triangle_cf.txt";
    g["workload"] = json::parse(R"({"generate": {"n_publishers": 4, "n_subscribers": 50, "pubs_per_publisher": 3}})");
    write_file((dir / "gen.json").string(), g.dump());
    auto [rc, out] = scotsim("workload gen " + (dir / "gen.json").string() + " --seed 4 --out " + dir.string(), dir);
    CHECK(rc == 0);
    const WorkloadScript w = workload_from_json(json::parse(read_file((dir / "workload.json").string())));
    CHECK(w.actions.size() == 4 + 12 + 50);
  }
}
