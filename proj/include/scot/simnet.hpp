#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "scot/broker.hpp"
#include "scot/report.hpp"
#include "scot/topology.hpp"

namespace scot {

struct LinkParams {
  /// Messages served per second; 0 stalls the link.
  double service_rate = 10000.0;
  Micros latency_us = 1000;

  bool operator==(const LinkParams&) const = default;
};

/// Modeled matching delay at a receiving broker: a constant plus a per-PRT-entry
/// term for publications.
struct MatchingCost {
  Micros constant_us = 0;
  double per_entry_us = 0.0;
};

using LinkKey = std::pair<BrokerId, BrokerId>;

struct SimConfig {
  Micros window_us = 50'000;
  double tau = 10.0;
  RoutingMode mode = RoutingMode::Static;
  LinkParams default_link;
  /// Per directed link overrides.
  std::map<LinkKey, LinkParams> link_overrides;
  MatchingCost matching;
  /// Modeled cost of one dynamic routing decision (reported, not simulated).
  Micros path_selection_us = 0;
  std::uint64_t seed = 1;
  bool record_hops = true;
  bool trace = false;
  /// Links whose queue length is sampled at every window rollover.
  std::vector<LinkKey> watch_links;

  /// Throws InvalidConfig on t_w <= 0, tau < 0 or negative rates/latencies.
  void validate() const;
};

/// A queued item; `msg` is empty for background (cross-traffic) filler.
struct QueuedItem {
  std::optional<Message> msg;
  Micros enqueued_at = 0;
};

/// Directed output queue of one overlay link.
struct LinkState {
  BrokerId from;
  BrokerId to;
  LinkType type = LinkType::ALink;
  std::deque<QueuedItem> queue;
  std::int64_t q_in = 0;   // current window
  std::int64_t q_out = 0;  // current window
  double service_rate = 0;
  Micros latency_us = 0;
  bool busy = false;

  std::uint64_t total_in = 0;
  std::uint64_t total_out = 0;
  std::uint64_t background = 0;
  std::int64_t max_q_len = 0;

  std::int64_t q_len() const { return static_cast<std::int64_t>(queue.size()); }
};

/// Same-time priority: lower runs first.
enum class EventKind { WindowRollover = 0, LinkControl = 1, Dequeue = 2, Deliver = 3, ClientAction = 4 };

std::string_view to_string(EventKind kind);

struct SimEvent {
  Micros time = 0;
  EventKind kind = EventKind::ClientAction;
  std::uint64_t seq = 0;
};

struct StepResult {
  bool quiescent = false;
  std::optional<SimEvent> event;
};

class TimeLimitExceeded : public Error {
 public:
  TimeLimitExceeded(Micros limit, RunReport partial)
      : Error(ErrorCode::TimeLimitExceeded, "simulation did not quiesce by t=" + std::to_string(limit) + "us"),
        partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

/// Deterministic discrete-event network of brokers joined by FIFO output queues.
/// The Scot must outlive the network.
class SimNet {
 public:
  SimNet(const Scot& scot, SimConfig config);

  const SimConfig& config() const { return config_; }
  const Scot& scot() const { return *scot_; }
  Micros now() const { return now_; }

  /// Attaches a client to its host broker. Throws UnknownBroker.
  void attach_client(const ClientId& client, const BrokerId& broker);
  std::optional<BrokerId> host_of(const ClientId& client) const;

  /// Schedules a client-issued message (advertise, subscribe, publish, ...).
  /// The issuing client must be attached.
  void schedule_client(Micros at, Message msg);

  /// Places a message on the output queue of link from->to now. Throws UnknownLink.
  void enqueue(const BrokerId& from, const BrokerId& to, Message msg);

  /// Changes the link's service rate at `at`; `backlog` filler messages are
  /// added to its queue at the same instant. Throws UnknownLink.
  void inject_congestion(const BrokerId& from, const BrokerId& to, double rate, Micros at,
                         std::int64_t backlog = 0);

  void mark(const std::string& name, Micros at) { report_.markers[name] = at; }

  /// Processes the earliest pending event. Quiescent once only window
  /// rollovers would remain.
  StepResult step();

  /// Steps until quiescent. Throws TimeLimitExceeded (with the partial report)
  /// when an event beyond `max_time` would be needed.
  RunReport run_until_quiescent(Micros max_time);

  /// Snapshot of the report so far.
  RunReport report() const;

  Broker& broker(const BrokerId& id);
  const Broker& broker(const BrokerId& id) const;
  const LinkState& link(const BrokerId& from, const BrokerId& to) const;
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  struct DequeueSubject {
    LinkKey link;
  };
  struct DeliverSubject {
    BrokerId to;
    Message msg;
  };
  struct ClientSubject {
    Message msg;
  };
  struct ControlSubject {
    LinkKey link;
    double rate;
    std::int64_t backlog;
  };
  using Subject = std::variant<std::monostate, DequeueSubject, DeliverSubject, ClientSubject, ControlSubject>;

  struct Pending {
    SimEvent event;
    Subject subject;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const;
  };

  void push(Micros at, EventKind kind, Subject subject);
  void ensure_rollover();
  LinkState& link_mut(const BrokerId& from, const BrokerId& to);
  void start_service(LinkState& link);
  Micros service_time(const LinkState& link) const;
  Micros matching_cost(const Broker& b, const Message& msg) const;
  void put_on_queue(LinkState& link, QueuedItem item);

  void on_rollover();
  void on_control(const ControlSubject& s);
  void on_dequeue(const DequeueSubject& s);
  void on_deliver(DeliverSubject& s);
  void on_client(ClientSubject& s);
  void dispatch(Broker& b, const Message& msg);
  void record_arrival(const BrokerId& b, const Message& msg);

  const Scot* scot_;
  SimConfig config_;
  Micros now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t pending_work_ = 0;
  bool rollover_scheduled_ = false;
  std::priority_queue<Pending, std::vector<Pending>, Later> events_;

  std::map<BrokerId, std::unique_ptr<Broker>> brokers_;
  std::map<LinkKey, LinkState> links_;
  std::map<ClientId, BrokerId> clients_;
  std::set<std::pair<std::string, BrokerId>> handled_pubs_;
  std::map<BrokerId, Micros> matching_totals_;

  RunReport report_;
  std::vector<std::string> trace_;
};

}  // namespace scot
