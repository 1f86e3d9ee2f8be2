#include "scot/broker.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <tuple>

namespace scot {

std::string_view to_string(RoutingMode mode) { return mode == RoutingMode::Static ? "static" : "dynamic"; }

RoutingMode parse_routing_mode(std::string_view text) {
  if (text == "static") return RoutingMode::Static;
  if (text == "dynamic") return RoutingMode::Dynamic;
  throw Error(ErrorCode::InvalidConfig, "routing mode must be 'static' or 'dynamic', got '" + std::string(text) + "'");
}

double congestion_element(const LinkStatus& row) {
  return static_cast<double>(1 + row.q_in) / static_cast<double>(1 + row.q_out);
}

bool is_link_congested(const LinkStatus& row, double tau) {
  if (row.q_len <= 0) return false;
  // Q_len * (1+Q_in) / (1+Q_out) > tau, cross-multiplied to stay exact.
  return static_cast<double>(row.q_len) * static_cast<double>(1 + row.q_in) >
         tau * static_cast<double>(1 + row.q_out);
}

std::string_view to_string(RoutingCase c) {
  switch (c) {
    case RoutingCase::None: return "none";
    case RoutingCase::CaseI: return "I";
    case RoutingCase::CaseII: return "II";
    case RoutingCase::CaseIII: return "III";
  }
  return "?";
}

Broker::Broker(const Scot& scot, BrokerId id, RoutingMode mode, double tau)
    : scot_(&scot), id_(std::move(id)), neighbours_(scot.neighbours(id_)), mode_(mode), tau_(tau) {}

std::vector<Message> Broker::handle(const Message& msg) {
  switch (msg.kind) {
    case MessageKind::Adv: return on_advertise(msg);
    case MessageKind::Unadv: return on_unadvertise(msg);
    case MessageKind::Sub: return on_subscribe(msg);
    case MessageKind::Unsub: return on_unsubscribe(msg);
    case MessageKind::CivSet: return on_civ_set(msg);
    case MessageKind::CivUnset: return on_civ_unset(msg);
    case MessageKind::Pub: return mode_ == RoutingMode::Static ? route_static(msg) : route_dynamic(msg);
  }
  return {};
}

LinkStatus Broker::link_status(const BrokerId& neighbour) const {
  auto it = lst_.find(neighbour);
  return it == lst_.end() ? LinkStatus{} : it->second;
}

bool Broker::congested(const BrokerId& neighbour) const { return is_link_congested(link_status(neighbour), tau_); }

Message Broker::forward(const Message& msg, const Endpoint& next) const {
  Message out = msg;
  out.last_hop = id_;
  out.next_hop = next;
  return out;
}

// ---------------------------------------------------------------------------
// Advertisement broadcast: host region only, one hop.

std::vector<Message> Broker::on_advertise(const Message& msg) {
  std::vector<Message> out;
  const int width = scot_->cluster_count();

  if (is_client(msg.last_hop)) {
    validate_predicates(msg.advertisement().predicates);
    const AdvUid uid{id_, next_adv_seq_++};
    const Civ civ = Civ::make(width, CivContext::Adv, id_.cluster);
    clt_.emplace(uid, CltEntry{uid, msg.advertisement(), civ, msg.last_hop});
    for (const auto& peer : neighbours_.secondary) {
      Message m = forward(msg, peer);
      m.civ = civ;
      m.adv_uid = uid;
      out.push_back(std::move(m));
    }
    return out;
  }

  if (!msg.adv_uid) throw Error(ErrorCode::UnknownAdvertisementUid, "advertisement without UID");
  const AdvUid uid = *msg.adv_uid;
  if (clt_.count(uid)) throw Error(ErrorCode::DuplicateAdvertisementUid, to_string(uid));

  const BrokerId sender = std::get<BrokerId>(msg.last_hop);
  Civ civ = Civ::make(width, CivContext::Sub, id_.cluster).with_bit(sender.cluster);
  const bool interested = std::any_of(prt_.begin(), prt_.end(), [&](const auto& kv) {
    return adv_overlaps_sub(msg.advertisement(), kv.second.sub);
  });
  if (interested) {
    civ = civ.with_bit(id_.cluster);
    Message set;
    set.kind = MessageKind::CivSet;
    set.adv_uid = uid;
    set.civ = civ;
    set.last_hop = id_;
    set.next_hop = sender;
    out.push_back(std::move(set));
  }
  clt_.emplace(uid, CltEntry{uid, msg.advertisement(), civ, sender});
  return out;
}

std::vector<Message> Broker::on_unadvertise(const Message& msg) {
  std::vector<Message> out;
  if (is_client(msg.last_hop)) {
    const ClientId publisher = std::get<ClientId>(msg.last_hop);
    std::vector<AdvUid> owned;
    for (const auto& [uid, entry] : clt_) {
      if (entry.civ.context() == CivContext::Adv && entry.last_hop == Endpoint{publisher}) owned.push_back(uid);
    }
    if (owned.empty()) throw Error(ErrorCode::UnknownAdvertisementUid, "no advertisement from " + publisher.value);
    for (const auto& uid : owned) {
      clt_.erase(uid);
      for (const auto& peer : neighbours_.secondary) {
        Message m = forward(msg, peer);
        m.adv_uid = uid;
        out.push_back(std::move(m));
      }
    }
    return out;
  }
  if (!msg.adv_uid || clt_.erase(*msg.adv_uid) == 0) {
    throw Error(ErrorCode::UnknownAdvertisementUid, msg.adv_uid ? to_string(*msg.adv_uid) : "missing UID");
  }
  return out;
}

// ---------------------------------------------------------------------------
// CIV maintenance at the publisher's host broker.

std::vector<Message> Broker::on_civ_set(const Message& msg) {
  if (!msg.adv_uid) throw Error(ErrorCode::UnknownAdvertisementUid, "CIV_SET without UID");
  auto it = clt_.find(*msg.adv_uid);
  if (it == clt_.end()) throw Error(ErrorCode::UnknownAdvertisementUid, to_string(*msg.adv_uid));

  const int j = std::get<BrokerId>(msg.last_hop).cluster;
  it->second.civ = it->second.civ.with_bit(j);

  if (msg.piggyback_sub) {
    for (auto& [uid, entry] : clt_) {
      if (entry.civ.context() == CivContext::Adv && !entry.civ.test(j) &&
          adv_overlaps_sub(entry.adv, *msg.piggyback_sub)) {
        entry.civ = entry.civ.with_bit(j);
      }
    }
  }
  return {};
}

std::vector<Message> Broker::on_civ_unset(const Message& msg) {
  if (!msg.adv_uid) throw Error(ErrorCode::UnknownAdvertisementUid, "CIV_UNSET without UID");
  auto it = clt_.find(*msg.adv_uid);
  if (it == clt_.end()) throw Error(ErrorCode::UnknownAdvertisementUid, to_string(*msg.adv_uid));
  const int j = std::get<BrokerId>(msg.last_hop).cluster;
  if (j != it->second.civ.owner_cluster()) it->second.civ = it->second.civ.without_bit(j);
  return {};
}

// ---------------------------------------------------------------------------
// Subscription broadcast: host cluster only.

std::vector<Message> Broker::on_subscribe(const Message& msg) {
  const Subscription& sub = msg.subscription();
  if (is_client(msg.last_hop)) validate_predicates(sub.predicates);
  if (prt_.count(sub.id)) throw Error(ErrorCode::DuplicateSubscriptionId, sub.id.value);

  std::vector<Message> out;
  for (const auto& n : neighbours_.primary) {
    if (msg.last_hop != Endpoint{n}) out.push_back(forward(msg, n));
  }
  prt_.emplace(sub.id, PrtEntry{sub, msg.last_hop});

  // One CIV_SET per host broker (iLink); the piggybacked subscription lets the
  // host flip the bit on its other matching advertisements.
  const int j = id_.cluster;
  std::map<BrokerId, std::vector<CltEntry*>> by_host;
  for (auto& [uid, entry] : clt_) {
    if (entry.civ.context() == CivContext::Sub && !entry.civ.test(j) && adv_overlaps_sub(entry.adv, sub)) {
      by_host[std::get<BrokerId>(entry.last_hop)].push_back(&entry);
    }
  }
  for (auto& [host, entries] : by_host) {
    for (CltEntry* e : entries) e->civ = e->civ.with_bit(j);
    Message set;
    set.kind = MessageKind::CivSet;
    set.adv_uid = entries.front()->uid;
    set.civ = entries.front()->civ;
    set.piggyback_sub = sub;
    set.last_hop = id_;
    set.next_hop = host;
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<Message> Broker::on_unsubscribe(const Message& msg) {
  auto it = prt_.find(msg.subscription_id());
  if (it == prt_.end()) throw Error(ErrorCode::UnknownSubscription, msg.subscription_id().value);
  const Subscription removed = it->second.sub;
  prt_.erase(it);

  std::vector<Message> out;
  for (const auto& n : neighbours_.primary) {
    if (msg.last_hop != Endpoint{n}) out.push_back(forward(msg, n));
  }

  const int j = id_.cluster;
  for (auto& [uid, entry] : clt_) {
    if (entry.civ.context() != CivContext::Sub || !entry.civ.test(j) || !adv_overlaps_sub(entry.adv, removed)) {
      continue;
    }
    const bool still_interested = std::any_of(prt_.begin(), prt_.end(), [&](const auto& kv) {
      return adv_overlaps_sub(entry.adv, kv.second.sub);
    });
    if (still_interested) continue;
    entry.civ = entry.civ.without_bit(j);
    Message unset;
    unset.kind = MessageKind::CivUnset;
    unset.adv_uid = uid;
    unset.last_hop = id_;
    unset.next_hop = entry.last_hop;
    out.push_back(std::move(unset));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Publication routing.

std::vector<Endpoint> Broker::distinct_next_hops(const Publication& pub, const Endpoint& sender) const {
  std::set<Endpoint> hops;
  for (const auto& [id, entry] : prt_) {
    if (entry.last_hop != sender && pub_matches_sub(pub, entry.sub)) hops.insert(entry.last_hop);
  }
  return {hops.begin(), hops.end()};
}

Civ Broker::host_civ(const Publication& pub) const {
  Civ civ = Civ::make(scot_->cluster_count(), CivContext::Adv, id_.cluster);
  bool found = false;
  for (const auto& [uid, entry] : clt_) {
    if (entry.civ.context() != CivContext::Adv || entry.adv.publisher != pub.publisher) continue;
    if (!pub_conforms_adv(pub, entry.adv)) continue;
    found = true;
    for (int j = 0; j < civ.width(); ++j) {
      if (entry.civ.test(j)) civ = civ.with_bit(j);
    }
  }
  if (!found) {
    throw Error(ErrorCode::NoMatchingAdvertisement,
                "no advertisement from " + pub.publisher.value + " at " + to_string(id_));
  }
  return civ;
}

std::optional<BrokerId> Broker::least_loaded(const std::vector<BrokerId>& candidates) const {
  std::optional<BrokerId> best;
  for (const auto& c : candidates) {
    if (!best || std::make_tuple(link_status(c).q_len, c) < std::make_tuple(link_status(*best).q_len, *best)) {
      best = c;
    }
  }
  return best;
}

std::vector<Message> Broker::route_static(const Message& msg) {
  const Publication& pub = msg.publication();
  ++stats_.publications;
  last_case_ = RoutingCase::None;

  std::vector<Message> out;
  for (const auto& hop : distinct_next_hops(pub, msg.last_hop)) {
    Message m = forward(msg, hop);
    m.civ.reset();
    out.push_back(std::move(m));
  }
  if (is_client(msg.last_hop)) {
    for (int j : host_civ(pub).target_clusters()) {
      Message m = forward(msg, scot_->region_peer(id_, j));
      m.civ.reset();
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<Message> Broker::route_dynamic(const Message& msg) {
  const Publication& pub = msg.publication();
  ++stats_.publications;
  last_case_ = RoutingCase::None;

  // Downstream replication inside the cluster, congested or not.
  std::vector<Message> out;
  std::vector<BrokerId> target_alinks;
  for (const auto& hop : distinct_next_hops(pub, msg.last_hop)) {
    Message m = forward(msg, hop);
    m.civ.reset();
    if (const auto* b = std::get_if<BrokerId>(&hop)) target_alinks.push_back(*b);
    out.push_back(std::move(m));
  }

  std::vector<int> target_clusters;
  std::optional<Civ> residual;
  if (is_client(msg.last_hop)) {
    target_clusters = host_civ(pub).target_clusters();
    residual = Civ::make(scot_->cluster_count(), CivContext::Pub, id_.cluster);
  } else if (msg.civ) {
    for (int j : msg.civ->target_clusters()) {
      if (j != id_.cluster) target_clusters.push_back(j);
    }
    residual = Civ::make(scot_->cluster_count(), CivContext::Pub, msg.civ->owner_cluster());
  } else {
    return out;
  }

  std::vector<BrokerId> open_ilinks;
  std::vector<BrokerId> congested_ilinks;
  for (int j : target_clusters) {
    const BrokerId peer = scot_->region_peer(id_, j);
    if (congested(peer)) {
      residual = residual->with_bit(j);
      congested_ilinks.push_back(peer);
    } else {
      Message m = forward(msg, peer);
      m.civ.reset();
      out.push_back(std::move(m));
      open_ilinks.push_back(peer);
    }
  }
  if (residual->none()) return out;

  ++stats_.decisions;
  auto attach = [&](const BrokerId& link) {
    for (auto& m : out) {
      if (m.next_hop == Endpoint{link}) {
        m.civ = residual;
        return;
      }
    }
  };

  std::vector<BrokerId> open_alinks;
  std::copy_if(target_alinks.begin(), target_alinks.end(), std::back_inserter(open_alinks),
               [this](const BrokerId& b) { return !congested(b); });

  if (auto mu = least_loaded(open_ilinks)) {
    last_case_ = RoutingCase::CaseI;
    ++stats_.case_i;
    attach(*mu);
  } else if (auto mu_a = least_loaded(open_alinks)) {
    last_case_ = RoutingCase::CaseII;
    ++stats_.case_ii;
    attach(*mu_a);
  } else if (auto mu_c = least_loaded(congested_ilinks)) {
    last_case_ = RoutingCase::CaseIII;
    ++stats_.case_iii;
    const Civ rest = residual->without_bit(mu_c->cluster);
    Message m = forward(msg, *mu_c);
    m.civ.reset();
    if (!rest.none()) m.civ = rest;
    out.push_back(std::move(m));
  } else {
    throw Error(ErrorCode::NoForwardingOption, "no link left at " + to_string(id_));
  }
  return out;
}

}  // namespace scot
