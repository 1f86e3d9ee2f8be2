#include "doctest.h"
#include "helpers.hpp"
#include "scot/simnet.hpp"

using namespace scot;
using namespace scot::testing;

namespace {

Message probe(std::uint64_t seq) {
  Message m = Message::publish(Publication{{{"price", 1.0}}, ClientId{"probe"}, seq});
  m.last_hop = BrokerId{"a", 0};
  return m;
}

struct Fixture {
  Scot scot = Scot::build(path_graph({"a", "b"}), complete_graph(2));
  SimConfig cfg;
  Fixture() { cfg.trace = true; }
};

/// Runs until the next event of `kind` and returns its time.
Micros next_time_of(SimNet& net, EventKind kind) {
  for (;;) {
    const StepResult r = net.step();
    REQUIRE_FALSE(r.quiescent);
    if (r.event->kind == kind) return r.event->time;
  }
}

}  // namespace

TEST_SUITE("simnet") {
  TEST_CASE("an idle network is quiescent immediately") {
    Fixture f;
    SimNet net(f.scot, f.cfg);
    CHECK(net.step().quiescent);
    const RunReport r = net.run_until_quiescent(1'000'000);
    CHECK(r.quiescent);
    CHECK(r.events == 0);
    CHECK(r.end_time == 0);
  }

  TEST_CASE("enqueue updates queue length and window counters") {
    Fixture f;
    f.cfg.default_link.service_rate = 0;
    SimNet net(f.scot, f.cfg);
    net.enqueue(B("a", 0), B("b", 0), probe(1));
    CHECK(net.link(B("a", 0), B("b", 0)).q_len() == 1);
    CHECK(net.link(B("a", 0), B("b", 0)).q_in == 1);
    net.enqueue(B("a", 0), B("b", 0), probe(2));
    net.enqueue(B("a", 0), B("b", 0), probe(3));
    const LinkState& l = net.link(B("a", 0), B("b", 0));
    CHECK(l.q_len() == 3);
    CHECK(l.q_in == 3);
    CHECK(l.q_out == 0);
    CHECK_THROWS_AS(net.enqueue(B("a", 0), B("b", 1), probe(4)), Error);
  }

  TEST_CASE("deliver time is enqueue time plus service time plus latency") {
    Fixture f;
    f.cfg.default_link = LinkParams{10'000, 1'000};  // 100us service
    SimNet net(f.scot, f.cfg);
    net.enqueue(B("a", 0), B("b", 0), probe(1));
    net.enqueue(B("a", 0), B("b", 0), probe(2));
    CHECK(next_time_of(net, EventKind::Dequeue) == 100);
    CHECK(next_time_of(net, EventKind::Dequeue) == 200);
    CHECK(next_time_of(net, EventKind::Deliver) == 1'100);
    CHECK(next_time_of(net, EventKind::Deliver) == 1'200);
  }

  TEST_CASE("matching cost adds to the deliver time") {
    Fixture f;
    f.cfg.default_link = LinkParams{10'000, 1'000};
    f.cfg.matching = MatchingCost{50, 0.0};
    SimNet net(f.scot, f.cfg);
    net.enqueue(B("a", 0), B("b", 0), probe(1));
    CHECK(next_time_of(net, EventKind::Deliver) == 1'150);
  }

  TEST_CASE("dequeue order equals enqueue order") {
    Fixture f;
    SimNet net(f.scot, f.cfg);
    for (std::uint64_t i = 1; i <= 20; ++i) net.enqueue(B("a", 0), B("b", 0), probe(i));
    net.run_until_quiescent(10'000'000);
    std::vector<std::string> order;
    for (const auto& line : net.trace()) {
      if (line.find(" deliver ") != std::string::npos) order.push_back(line.substr(line.find("probe")));
    }
    REQUIRE(order.size() == 20);
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i].rfind("probe:" + std::to_string(i + 1) + " ", 0) == 0);
  }

  TEST_CASE("rollover snapshots the window into the sender's link status") {
    Fixture f;
    SimNet net(f.scot, f.cfg);
    net.inject_congestion(B("a", 0), B("b", 0), 0, 0, 5);
    net.inject_congestion(B("a", 0), B("b", 0), 10'000, 120'000);
    CHECK(next_time_of(net, EventKind::WindowRollover) == 50'000);
    CHECK(net.broker(B("a", 0)).link_status(B("b", 0)) == LinkStatus{5, 5, 0});
    CHECK(net.broker(B("a", 0)).congested(B("b", 0)));  // 5 * 6 / 1 > 10
    CHECK(next_time_of(net, EventKind::WindowRollover) == 100'000);
    CHECK(net.broker(B("a", 0)).link_status(B("b", 0)) == LinkStatus{5, 0, 0});

    // Restored at 120ms: the five fillers drain by 120.5ms and are never
    // delivered. A later client action keeps windows rolling past the drain.
    net.attach_client(ClientId{"P"}, B("b", 1));
    net.schedule_client(200'000, Message::advertise(Advertisement{{}, ClientId{"P"}}));
    const RunReport r = net.run_until_quiescent(10'000'000);
    CHECK(net.broker(B("a", 0)).link_status(B("b", 0)).q_len == 0);
    CHECK(net.link(B("a", 0), B("b", 0)).q_len() == 0);
    CHECK(net.link(B("a", 0), B("b", 0)).total_out == 5);
    CHECK(net.link(B("a", 0), B("b", 0)).background == 5);
    for (const auto& line : net.trace()) CHECK(line.find("deliver Pub") == std::string::npos);
    CHECK(r.im_counts.at("abp") == 1);
    CHECK(r.im_counts.at("routing") == 0);
  }

  TEST_CASE("window accounting: end length is start length plus in minus out") {
    Fixture f;
    f.cfg.default_link = LinkParams{100, 0};  // 10ms per message
    f.cfg.watch_links = {{B("a", 0), B("b", 0)}};
    SimNet net(f.scot, f.cfg);
    for (std::uint64_t i = 1; i <= 12; ++i) net.enqueue(B("a", 0), B("b", 0), probe(i));
    std::int64_t prev = 12;
    for (int w = 0; w < 2; ++w) {
      next_time_of(net, EventKind::WindowRollover);
      const LinkStatus s = net.broker(B("a", 0)).link_status(B("b", 0));
      CHECK(s.q_len == prev + (w == 0 ? 0 : s.q_in) - s.q_out);
      prev = s.q_len;
    }
    CHECK(prev == 3);
    CHECK(net.report().link_series.at("B(a,0)->B(b,0)") == std::vector<std::int64_t>{8, 3});
    // The last three leave at 100, 110 and 120ms; no rollover is needed after that.
    net.run_until_quiescent(10'000'000);
    CHECK(net.now() == 120'000);
    CHECK(net.link(B("a", 0), B("b", 0)).total_out == 12);
  }

  TEST_CASE("a congested link drains after its rate is restored") {
    Fixture f;
    SimNet net(f.scot, f.cfg);
    net.inject_congestion(B("a", 0), B("b", 0), 0, 0, 30);
    net.inject_congestion(B("a", 0), B("b", 0), 10'000, 60'000);
    net.attach_client(ClientId{"P"}, B("b", 1));
    net.schedule_client(300'000, Message::advertise(Advertisement{{}, ClientId{"P"}}));
    next_time_of(net, EventKind::WindowRollover);
    CHECK(net.broker(B("a", 0)).congested(B("b", 0)));
    net.run_until_quiescent(10'000'000);
    CHECK_FALSE(net.broker(B("a", 0)).congested(B("b", 0)));
    CHECK_THROWS_AS(net.inject_congestion(B("a", 0), B("b", 0), -1, 0), Error);
    CHECK_THROWS_AS(net.inject_congestion(B("a", 0), B("a", 0), 1, 0), Error);
  }

  TEST_CASE("time limit reports the partial run") {
    Fixture f;
    SimNet net(f.scot, f.cfg);
    net.attach_client(ClientId{"P"}, B("a", 0));
    net.schedule_client(5'000'000, Message::advertise(Advertisement{{}, ClientId{"P"}}));
    try {
      net.run_until_quiescent(1'000'000);
      FAIL("expected TimeLimitExceeded");
    } catch (const TimeLimitExceeded& e) {
      CHECK(e.code() == ErrorCode::TimeLimitExceeded);
      CHECK_FALSE(e.partial().quiescent);
    }
    CHECK_THROWS_AS(net.schedule_client(0, Message::advertise(Advertisement{{}, ClientId{"nobody"}})), Error);
    CHECK_THROWS_AS(net.attach_client(ClientId{"Q"}, B("z", 0)), Error);
  }

  TEST_CASE("control plane only run places tables by region and cluster") {
    const Scot scot = Scot::build(six_region_af(), complete_graph(3));
    SimNet net(scot, SimConfig{});
    net.attach_client(ClientId{"P0"}, B("a", 0));
    net.attach_client(ClientId{"S0"}, B("c", 1));
    net.schedule_client(0, Message::advertise(Advertisement{{{"x", Op::Ge, 0.0}}, ClientId{"P0"}}));
    net.schedule_client(0, Message::subscribe(Subscription{SubscriptionId{"s"}, {{"x", Op::Ge, 1.0}}, ClientId{"S0"}}));
    const RunReport r = net.run_until_quiescent(10'000'000);
    CHECK(r.quiescent);
    CHECK(r.im_counts.at("abp") == 2);
    CHECK(r.im_counts.at("sbp") == 5);
    CHECK(r.im_counts.at("civ") == 1);
    for (const auto& [b, s] : r.brokers) {
      CHECK((s.clt_entries == 1) == (b.region == "a"));
      CHECK((s.prt_entries == 1) == (b.cluster == 1));
    }
  }

  TEST_CASE("publications without subscribers create no inter-cluster traffic") {
    const Scot scot = Scot::build(six_region_af(), complete_graph(3));
    SimNet net(scot, SimConfig{});
    net.attach_client(ClientId{"P0"}, B("a", 0));
    net.schedule_client(0, Message::advertise(Advertisement{{}, ClientId{"P0"}}));
    for (std::uint64_t i = 1; i <= 5; ++i) {
      net.schedule_client(100'000 * static_cast<Micros>(i), Message::publish(Publication{{{"x", 1.0}}, ClientId{"P0"}, i}));
    }
    const RunReport r = net.run_until_quiescent(10'000'000);
    CHECK(r.im_counts.at("routing") == 0);
    CHECK(r.shape.publications == 5);
    CHECK(r.deliveries.empty());
  }

  TEST_CASE("identical configurations give identical traces and reports") {
    auto run = [] {
      const Scot scot = Scot::build(six_region_af(), complete_graph(3));
      SimConfig cfg;
      cfg.trace = true;
      cfg.mode = RoutingMode::Dynamic;
      SimNet net(scot, cfg);
      net.attach_client(ClientId{"P"}, B("b", 0));
      net.attach_client(ClientId{"S"}, B("f", 2));
      net.schedule_client(0, Message::advertise(Advertisement{{}, ClientId{"P"}}));
      net.schedule_client(0, Message::subscribe(Subscription{SubscriptionId{"s"}, {}, ClientId{"S"}}));
      net.inject_congestion(B("b", 0), B("b", 2), 0, 0, 40);
      for (std::uint64_t i = 1; i <= 10; ++i) {
        net.schedule_client(100'000 + 1000 * static_cast<Micros>(i),
                            Message::publish(Publication{{{"x", 1.0}}, ClientId{"P"}, i}));
      }
      net.inject_congestion(B("b", 0), B("b", 2), 10'000, 500'000);
      const RunReport r = net.run_until_quiescent(10'000'000);
      return std::pair{net.trace(), to_json(r)};
    };
    const auto first = run();
    const auto second = run();
    CHECK(first.first == second.first);
    CHECK(first.second == second.second);
  }

  TEST_CASE("configuration validation") {
    SimConfig cfg;
    cfg.window_us = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SimConfig{};
    cfg.tau = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SimConfig{};
    cfg.default_link.latency_us = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_NOTHROW(SimConfig{}.validate());
  }

  TEST_CASE("event kinds have readable names") {
    CHECK(to_string(EventKind::WindowRollover) == "rollover");
  }
}
