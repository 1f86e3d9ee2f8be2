#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "scot/simnet.hpp"
#include "scot/workload.hpp"

using namespace scot;
using namespace scot::testing;

namespace {

Scot small_scot() { return Scot::build(path_graph({"a", "b", "c"}), complete_graph(4)); }

WorkloadConfig small_config(std::uint64_t seed = 5) {
  WorkloadConfig cfg;
  cfg.n_publishers = 10;
  cfg.n_subscribers = 100;
  cfg.pubs_per_publisher = 10;
  cfg.seed = seed;
  return cfg;
}

std::map<std::string, Advertisement> advertisements_of(const WorkloadScript& s) {
  std::map<std::string, Advertisement> out;
  for (const auto& a : s.actions) {
    if (a.message.kind == MessageKind::Adv) out.emplace(a.client, a.message.advertisement());
  }
  return out;
}

}  // namespace

TEST_SUITE("workload") {
  TEST_CASE("bounded draws stay in range and are reproducible") {
    Rng a(9);
    Rng b(9);
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.below(7);
      CHECK(x < 7);
      CHECK(x == b.below(7));
      const double u = a.unit();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      CHECK(u == b.unit());
    }
  }

  TEST_CASE("fixed seed regenerates the identical script") {
    const Scot scot = small_scot();
    CHECK(to_json(generate(small_config(), scot)) == to_json(generate(small_config(), scot)));
    CHECK(to_json(generate(small_config(5), scot)) != to_json(generate(small_config(6), scot)));
  }

  TEST_CASE("measured selectivity is within 25 percent of the target") {
    const Scot scot = small_scot();
    for (std::uint64_t seed : {1, 2, 3}) {
      for (auto style : {AdvertisementStyle::Domain, AdvertisementStyle::Point}) {
        WorkloadConfig cfg = small_config(seed);
        cfg.adv_style = style;
        const double s = measured_selectivity(generate(cfg, scot));
        CHECK(s >= 0.02 * 0.75);
        CHECK(s <= 0.02 * 1.25);
      }
    }
  }

  TEST_CASE("every publication conforms to its publisher's advertisement") {
    const Scot scot = small_scot();
    for (auto style : {AdvertisementStyle::Domain, AdvertisementStyle::Point}) {
      WorkloadConfig cfg = small_config();
      cfg.adv_style = style;
      const WorkloadScript s = generate(cfg, scot);
      const auto ads = advertisements_of(s);
      std::size_t pubs = 0;
      for (const auto& a : s.actions) {
        if (a.message.kind != MessageKind::Pub) continue;
        ++pubs;
        CHECK(pub_conforms_adv(a.message.publication(), ads.at(a.client)));
      }
      CHECK(pubs == cfg.n_publishers * cfg.pubs_per_publisher);
    }
  }

  TEST_CASE("one hundred publishers and a thousand subscribers give 1100 clients") {
    const Scot scot = small_scot();
    WorkloadConfig cfg = small_config();
    cfg.n_publishers = 100;
    cfg.n_subscribers = 1000;
    cfg.pubs_per_publisher = 2;
    cfg.pub_start_us = 2'000'000;
    const WorkloadScript s = generate(cfg, scot);
    std::map<std::string, int> control;
    std::set<BrokerId> used;
    for (const auto& a : s.actions) {
      CHECK(scot.contains(a.broker));
      used.insert(a.broker);
      if (a.message.kind == MessageKind::Adv || a.message.kind == MessageKind::Sub) ++control[a.client];
    }
    CHECK(control.size() == 1100);
    for (const auto& [client, n] : control) CHECK(n == 1);
    CHECK(used.size() == scot.broker_count());
  }

  TEST_CASE("publication spacing follows the per-minute rate") {
    const Scot scot = small_scot();
    WorkloadConfig cfg = small_config();
    cfg.pub_rate = 120;  // one every 500ms
    const WorkloadScript s = generate(cfg, scot);
    std::map<std::string, std::vector<Micros>> times;
    for (const auto& a : s.actions) {
      if (a.message.kind == MessageKind::Pub) times[a.client].push_back(a.time);
    }
    for (const auto& [client, ts] : times) {
      for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] - ts[i - 1] == 500'000);
    }
  }

  TEST_CASE("impossible selectivity is reported") {
    WorkloadConfig cfg = small_config();
    cfg.selectivity = 1e-9;
    cfg.tolerance = 1e-6;
    CHECK_THROWS_AS(generate(cfg, small_scot()), Error);
    cfg = small_config();
    cfg.selectivity = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }

  TEST_CASE("burst duration follows rate and total") {
    const Scot scot = small_scot();
    BurstConfig burst;
    burst.hrp_total = 50'000;
    burst.hrp_rates = {100'000, 40'000};
    burst.matching_fraction = 0.05;
    const auto scripts = generate_burst(burst, generate(small_config(), scot), scot);
    REQUIRE(scripts.size() == 2);
    const Micros d100 = scripts[0].markers.at("burst_end") - scripts[0].markers.at("burst_start");
    const Micros d40 = scripts[1].markers.at("burst_end") - scripts[1].markers.at("burst_start");
    // 50K publications at 600us spacing: the last leaves one interval before 30s.
    CHECK(d100 == 30'000'000 - 600);
    CHECK(d40 == 75'000'000 - 1'500);
  }

  TEST_CASE("a tenth of a percent of ten thousand subscribers spans every cluster") {
    const Scot scot = Scot::build(load_factor(scenario_path("eval14_af.txt")).graph, complete_graph(4));
    WorkloadConfig cfg = small_config();
    cfg.n_subscribers = 10'000;
    cfg.pubs_per_publisher = 1;
    cfg.control_spacing_us = 100;
    cfg.pub_start_us = 2'000'000;
    BurstConfig burst;
    burst.hrp_total = 10;
    const WorkloadScript base = generate(cfg, scot);
    const auto scripts = generate_burst(burst, base, scot);
    const WorkloadScript& s = scripts.front();
    BrokerId host;
    std::set<int> clusters;
    std::size_t hrp_subs = 0;
    for (const auto& a : s.actions) {
      if (a.client == "HRP") host = a.broker;
    }
    for (const auto& a : s.actions) {
      if (a.message.kind != MessageKind::Sub || a.client[0] != 'H') continue;
      ++hrp_subs;
      clusters.insert(a.broker.cluster);
      CHECK(a.broker != host);
    }
    CHECK(hrp_subs == 10);
    CHECK(clusters.size() == 4);

    // HRP publications match only the added subscribers.
    for (const auto& [sub, pub] : expected_deliveries(s)) {
      if (pub.rfind("HRP:", 0) == 0) CHECK(sub[0] == 'H');
    }
  }

  TEST_CASE("burst placement infeasibility") {
    const Scot scot = small_scot();
    BurstConfig burst;
    burst.hrp_total = 5;
    burst.matching_fraction = 0.01;  // 1 of 100 cannot cover 4 clusters
    CHECK_THROWS_AS(generate_burst(burst, generate(small_config(), scot), scot), Error);

    Graph single;
    single.add_vertex("a");
    const Scot one = Scot::build(single, complete_graph(2));
    WorkloadConfig cfg = small_config();
    cfg.n_subscribers = 20;
    burst.matching_fraction = 0.1;
    burst.hrp_host = B("a", 0);
    try {
      generate_burst(burst, generate(cfg, one), one);
      FAIL("expected PlacementInfeasible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PlacementInfeasible);
    }
  }

  TEST_CASE("after the control plane settles every cluster is a target of the HRP") {
    const Scot scot = small_scot();
    WorkloadConfig cfg = small_config();
    cfg.pubs_per_publisher = 1;
    BurstConfig burst;
    burst.hrp_total = 3;
    burst.matching_fraction = 0.05;
    const WorkloadScript s = generate_burst(burst, generate(cfg, scot), scot).front();
    SimNet net(scot, SimConfig{});
    load_into(s, net);
    net.run_until_quiescent(600'000'000);
    const BrokerId host = *net.host_of(ClientId{"HRP"});
    bool found = false;
    for (const auto& [uid, entry] : net.broker(host).clt()) {
      if (entry.adv.publisher.value != "HRP") continue;
      found = true;
      CHECK(entry.civ.to_string() == "1111");
    }
    CHECK(found);
  }

  TEST_CASE("basis CSV import") {
    const auto rows = parse_basis_csv("sym,open,high,low,close,volume,adj\nIBM,1,2,0.5,1.5,100,1.4\nAAPL,3,4,2,3.5,200,3.3\n");
    REQUIRE(rows.size() == 2);
    CHECK(std::get<std::string>(rows[0].at("symbol")) == "IBM");
    CHECK(std::get<double>(rows[1].at("volume")) == 200.0);
    CHECK_THROWS_AS(parse_basis_csv("a,b,c\n1,2,3\n"), Error);
    CHECK_THROWS_AS(parse_basis_csv("s,a,b,c,d,e,f\nX,1,2,3,4,5,notanumber\n"), Error);

    // A larger basis drives generation: every publication is one of its rows.
    std::string csv = "sym,open,high,low,close,volume,adj\n";
    for (int i = 0; i < 60; ++i) {
      csv += (i % 2 ? "IBM," : "AAPL,") + std::to_string(i % 7) + "," + std::to_string((i * 13) % 17) + "," +
             std::to_string((i * 5) % 11) + "," + std::to_string((i * 7) % 19) + "," + std::to_string(i * 10) + "," +
             std::to_string((i * 3) % 23) + "\n";
    }
    WorkloadConfig cfg = small_config();
    cfg.basis = parse_basis_csv(csv);
    const WorkloadScript s = generate(cfg, small_scot());
    for (const auto& a : s.actions) {
      if (a.message.kind != MessageKind::Pub) continue;
      const auto& attrs = a.message.publication().attrs;
      CHECK(std::find(cfg.basis.begin(), cfg.basis.end(), attrs) != cfg.basis.end());
    }
    const double sel = measured_selectivity(s);
    CHECK(sel >= 0.015);
    CHECK(sel <= 0.025);
  }

  TEST_CASE("script JSON round-trips") {
    const Scot scot = small_scot();
    const WorkloadScript s = generate(small_config(), scot);
    const std::string text = to_json(s);
    const WorkloadScript back = workload_from_json(nlohmann::json::parse(text));
    CHECK(to_json(back) == text);
    CHECK_THROWS_AS(workload_from_json(nlohmann::json::parse(R"({"schema_version": 99, "actions": []})")), Error);
  }

  TEST_CASE("advertisement style names") {
    CHECK(parse_advertisement_style("point") == AdvertisementStyle::Point);
    CHECK(to_string(AdvertisementStyle::Domain) == "domain");
    CHECK_THROWS_AS(parse_advertisement_style("box"), Error);
  }
}
