#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "scot/message.hpp"
#include "scot/topology.hpp"

namespace scot {

enum class RoutingMode { Static, Dynamic };

std::string_view to_string(RoutingMode mode);
RoutingMode parse_routing_mode(std::string_view text);

/// One LST row: queue length and the in/out counters of the last completed window.
struct LinkStatus {
  std::int64_t q_len = 0;
  std::int64_t q_in = 0;
  std::int64_t q_out = 0;

  bool operator==(const LinkStatus&) const = default;
};

/// (1 + Q_in) / (1 + Q_out).
double congestion_element(const LinkStatus& row);

/// Q_len * CE > tau, strictly.
bool is_link_congested(const LinkStatus& row, double tau);

struct CltEntry {
  AdvUid uid;
  Advertisement adv;
  Civ civ;
  Endpoint last_hop;
};

struct PrtEntry {
  Subscription sub;
  Endpoint last_hop;
};

enum class RoutingCase { None, CaseI, CaseII, CaseIII };

std::string_view to_string(RoutingCase c);

struct RoutingStats {
  std::uint64_t publications = 0;
  std::uint64_t decisions = 0;
  std::uint64_t case_i = 0;
  std::uint64_t case_ii = 0;
  std::uint64_t case_iii = 0;
};

/// Per-broker state machine. Every handler consumes one message and returns the
/// messages to send, each with next_hop set (a neighbour broker or a local
/// client). The broker only knows its direct neighbours; the Scot reference
/// must outlive it.
class Broker {
 public:
  Broker(const Scot& scot, BrokerId id, RoutingMode mode = RoutingMode::Static, double tau = 10.0);

  const BrokerId& id() const { return id_; }
  RoutingMode mode() const { return mode_; }
  void set_mode(RoutingMode mode) { mode_ = mode; }
  double tau() const { return tau_; }

  /// Dispatches on msg.kind.
  std::vector<Message> handle(const Message& msg);

  std::vector<Message> on_advertise(const Message& msg);
  std::vector<Message> on_unadvertise(const Message& msg);
  std::vector<Message> on_civ_set(const Message& msg);
  std::vector<Message> on_civ_unset(const Message& msg);
  std::vector<Message> on_subscribe(const Message& msg);
  std::vector<Message> on_unsubscribe(const Message& msg);
  std::vector<Message> route_static(const Message& msg);
  std::vector<Message> route_dynamic(const Message& msg);

  const std::map<AdvUid, CltEntry>& clt() const { return clt_; }
  const std::map<SubscriptionId, PrtEntry>& prt() const { return prt_; }

  const std::map<BrokerId, LinkStatus>& lst() const { return lst_; }
  void set_link_status(const BrokerId& neighbour, LinkStatus row) { lst_[neighbour] = row; }
  LinkStatus link_status(const BrokerId& neighbour) const;
  bool congested(const BrokerId& neighbour) const;

  const RoutingStats& stats() const { return stats_; }
  RoutingCase last_case() const { return last_case_; }

 private:
  Message forward(const Message& msg, const Endpoint& next) const;
  /// Distinct next hops of PRT entries matching the publication, excluding `sender`.
  std::vector<Endpoint> distinct_next_hops(const Publication& pub, const Endpoint& sender) const;
  /// OR of the advertisement CIVs hosted here for this publication's publisher.
  Civ host_civ(const Publication& pub) const;
  std::optional<BrokerId> least_loaded(const std::vector<BrokerId>& candidates) const;

  const Scot* scot_;
  BrokerId id_;
  Neighbours neighbours_;
  RoutingMode mode_;
  double tau_;
  std::uint64_t next_adv_seq_ = 1;

  std::map<AdvUid, CltEntry> clt_;
  std::map<SubscriptionId, PrtEntry> prt_;
  std::map<BrokerId, LinkStatus> lst_;

  RoutingStats stats_;
  RoutingCase last_case_ = RoutingCase::None;
};

}  // namespace scot
