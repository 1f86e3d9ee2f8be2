#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "scot/broker.hpp"
#include "scot/message.hpp"

namespace scot {

/// Simulation time in integer microseconds.
using Micros = std::int64_t;

/// A publication handed to a subscriber.
struct DeliveryRecord {
  std::string subscriber;
  std::string pub;  // "publisher:seqno"
  BrokerId broker;  // subscriber's host broker
  Micros published_at = 0;
  Micros delivered_at = 0;
  int hops = 0;
  int publisher_cluster = 0;
};

/// One message placed on one overlay link (one inter-broker message).
struct HopRecord {
  Micros time = 0;
  MessageKind kind = MessageKind::Pub;
  std::string key;
  BrokerId from;
  BrokerId to;
  std::string civ;  // empty when no CIV rides on the message
};

/// First arrival of an advertisement or subscription at each broker.
struct ControlRecord {
  Micros issued_at = 0;
  std::map<BrokerId, Micros> reached;
};

struct PublicationRecord {
  Micros published_at = 0;
  BrokerId host;
};

struct LinkSummary {
  BrokerId from;
  BrokerId to;
  LinkType type = LinkType::ALink;
  std::uint64_t enqueued = 0;
  std::uint64_t dequeued = 0;
  std::uint64_t background = 0;
  std::int64_t max_q_len = 0;
  std::int64_t final_q_len = 0;
};

struct BrokerSummary {
  std::size_t clt_entries = 0;
  std::size_t prt_entries = 0;
  Micros matching_cost = 0;
  RoutingStats routing;
};

struct BrokerError {
  Micros time = 0;
  BrokerId broker;
  std::string what;
};

struct RunShape {
  std::size_t brokers = 0;
  int clusters = 0;
  std::size_t regions = 0;
  std::size_t advertisements = 0;
  std::size_t subscriptions = 0;
  std::size_t publications = 0;

  bool operator==(const RunShape&) const = default;
};

/// Everything a simulation run produced; the input to metrics.
struct RunReport {
  RunShape shape;
  RoutingMode mode = RoutingMode::Static;
  std::uint64_t seed = 0;
  Micros window_us = 0;
  double tau = 0;
  Micros path_selection_us = 0;
  Micros end_time = 0;
  bool quiescent = false;
  std::uint64_t events = 0;

  /// Inter-broker messages by phase: abp, sbp, civ, routing.
  std::map<std::string, std::uint64_t> im_counts;
  std::uint64_t duplicate_handling = 0;

  std::map<std::string, PublicationRecord> publications;
  std::vector<DeliveryRecord> deliveries;
  std::vector<HopRecord> hops;
  std::map<std::string, ControlRecord> advertisements;  // keyed by publisher
  std::map<std::string, ControlRecord> subscriptions;   // keyed by subscription id
  std::vector<LinkSummary> links;
  std::map<BrokerId, BrokerSummary> brokers;
  /// Publication copies placed on each broker's output queues, per window index.
  std::map<BrokerId, std::map<std::int64_t, std::uint64_t>> pub_insertions;
  /// Queue length at each window rollover, for watched links ("B(a,0)->B(a,1)").
  std::map<std::string, std::vector<std::int64_t>> link_series;
  /// Rollover instants matching the link_series samples.
  std::vector<Micros> series_times;
  /// Named instants (e.g. burst_start, burst_end).
  std::map<std::string, Micros> markers;
  std::vector<BrokerError> errors;
};

std::string link_name(const BrokerId& from, const BrokerId& to);

/// Stable JSON rendering (sorted object keys, records in event order).
nlohmann::json to_json_value(const RunReport& report);
std::string to_json(const RunReport& report);

}  // namespace scot
