#include "scot/simnet.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace scot {

namespace {

std::string phase_of(MessageKind kind) {
  switch (kind) {
    case MessageKind::Adv:
    case MessageKind::Unadv: return "abp";
    case MessageKind::Sub:
    case MessageKind::Unsub: return "sbp";
    case MessageKind::CivSet:
    case MessageKind::CivUnset: return "civ";
    case MessageKind::Pub: return "routing";
  }
  return "other";
}

std::string key_of(const Message& msg) {
  switch (msg.kind) {
    case MessageKind::Pub: return to_string(msg.pub_key());
    case MessageKind::Adv: return msg.advertisement().publisher.value;
    case MessageKind::Sub: return msg.subscription().id.value;
    case MessageKind::Unsub: return msg.subscription_id().value;
    case MessageKind::Unadv:
    case MessageKind::CivSet:
    case MessageKind::CivUnset:
      if (msg.adv_uid) return to_string(*msg.adv_uid);
      if (auto c = msg.origin_client()) return c->value;
      return "";
  }
  return "";
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::WindowRollover: return "rollover";
    case EventKind::LinkControl: return "link_control";
    case EventKind::Dequeue: return "dequeue";
    case EventKind::Deliver: return "deliver";
    case EventKind::ClientAction: return "client";
  }
  return "?";
}

void SimConfig::validate() const {
  if (window_us <= 0) throw Error(ErrorCode::InvalidConfig, "t_w must be positive");
  if (!(tau >= 0)) throw Error(ErrorCode::InvalidConfig, "tau must be non-negative");
  auto check = [](const LinkParams& p) {
    if (!(p.service_rate >= 0)) throw Error(ErrorCode::InvalidConfig, "service rate must be non-negative");
    if (p.latency_us < 0) throw Error(ErrorCode::InvalidConfig, "latency must be non-negative");
  };
  check(default_link);
  for (const auto& [key, p] : link_overrides) check(p);
  if (matching.constant_us < 0 || matching.per_entry_us < 0) {
    throw Error(ErrorCode::InvalidConfig, "matching cost must be non-negative");
  }
  if (path_selection_us < 0) throw Error(ErrorCode::InvalidConfig, "path selection cost must be non-negative");
}

bool SimNet::Later::operator()(const Pending& a, const Pending& b) const {
  return std::make_tuple(a.event.time, static_cast<int>(a.event.kind), a.event.seq) >
         std::make_tuple(b.event.time, static_cast<int>(b.event.kind), b.event.seq);
}

SimNet::SimNet(const Scot& scot, SimConfig config) : scot_(&scot), config_(std::move(config)) {
  config_.validate();
  for (const auto& id : scot.brokers()) {
    brokers_.emplace(id, std::make_unique<Broker>(scot, id, config_.mode, config_.tau));
  }
  for (const auto& [a, b] : scot.product().edges()) {
    for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      LinkState link;
      link.from = from;
      link.to = to;
      link.type = scot.link_type(from, to);
      auto it = config_.link_overrides.find({from, to});
      const LinkParams& p = it == config_.link_overrides.end() ? config_.default_link : it->second;
      link.service_rate = p.service_rate;
      link.latency_us = p.latency_us;
      links_.emplace(LinkKey{from, to}, std::move(link));
    }
  }
  for (const auto& [key, p] : config_.link_overrides) {
    if (!links_.count(key)) throw Error(ErrorCode::UnknownLink, link_name(key.first, key.second));
  }
  for (const auto& key : config_.watch_links) {
    if (!links_.count(key)) throw Error(ErrorCode::UnknownLink, link_name(key.first, key.second));
    report_.link_series[link_name(key.first, key.second)];
  }
  for (const char* phase : {"abp", "sbp", "civ", "routing"}) report_.im_counts[phase] = 0;
}

void SimNet::attach_client(const ClientId& client, const BrokerId& broker) {
  if (!scot_->contains(broker)) throw Error(ErrorCode::UnknownBroker, to_string(broker));
  clients_[client] = broker;
}

std::optional<BrokerId> SimNet::host_of(const ClientId& client) const {
  auto it = clients_.find(client);
  if (it == clients_.end()) return std::nullopt;
  return it->second;
}

Broker& SimNet::broker(const BrokerId& id) {
  auto it = brokers_.find(id);
  if (it == brokers_.end()) throw Error(ErrorCode::UnknownBroker, to_string(id));
  return *it->second;
}

const Broker& SimNet::broker(const BrokerId& id) const {
  auto it = brokers_.find(id);
  if (it == brokers_.end()) throw Error(ErrorCode::UnknownBroker, to_string(id));
  return *it->second;
}

const LinkState& SimNet::link(const BrokerId& from, const BrokerId& to) const {
  auto it = links_.find({from, to});
  if (it == links_.end()) throw Error(ErrorCode::UnknownLink, link_name(from, to));
  return it->second;
}

LinkState& SimNet::link_mut(const BrokerId& from, const BrokerId& to) {
  auto it = links_.find({from, to});
  if (it == links_.end()) throw Error(ErrorCode::UnknownLink, link_name(from, to));
  return it->second;
}

void SimNet::push(Micros at, EventKind kind, Subject subject) {
  events_.push(Pending{SimEvent{at, kind, next_seq_++}, std::move(subject)});
  if (kind != EventKind::WindowRollover) {
    ++pending_work_;
    ensure_rollover();
  }
}

void SimNet::ensure_rollover() {
  if (rollover_scheduled_) return;
  rollover_scheduled_ = true;
  const Micros next = (now_ / config_.window_us + 1) * config_.window_us;
  push(next, EventKind::WindowRollover, std::monostate{});
}

void SimNet::schedule_client(Micros at, Message msg) {
  const auto client = is_client(msg.last_hop) ? std::optional<ClientId>(std::get<ClientId>(msg.last_hop))
                                              : std::nullopt;
  if (!client || !clients_.count(*client)) {
    throw Error(ErrorCode::UnknownBroker, "client " + (client ? client->value : std::string("?")) + " is not attached");
  }
  push(std::max(at, now_), EventKind::ClientAction, ClientSubject{std::move(msg)});
}

void SimNet::inject_congestion(const BrokerId& from, const BrokerId& to, double rate, Micros at,
                               std::int64_t backlog) {
  link_mut(from, to);
  if (!(rate >= 0)) throw Error(ErrorCode::InvalidConfig, "service rate must be non-negative");
  if (backlog < 0) throw Error(ErrorCode::InvalidConfig, "backlog must be non-negative");
  push(std::max(at, now_), EventKind::LinkControl, ControlSubject{{from, to}, rate, backlog});
}

Micros SimNet::service_time(const LinkState& link) const {
  return static_cast<Micros>(std::llround(1e6 / link.service_rate));
}

Micros SimNet::matching_cost(const Broker& b, const Message& msg) const {
  Micros cost = config_.matching.constant_us;
  if (msg.kind == MessageKind::Pub) {
    cost += static_cast<Micros>(std::llround(config_.matching.per_entry_us * static_cast<double>(b.prt().size())));
  }
  return cost;
}

void SimNet::start_service(LinkState& link) {
  if (link.busy || link.queue.empty() || link.service_rate <= 0) return;
  link.busy = true;
  push(now_ + service_time(link), EventKind::Dequeue, DequeueSubject{{link.from, link.to}});
}

void SimNet::put_on_queue(LinkState& link, QueuedItem item) {
  link.queue.push_back(std::move(item));
  ++link.q_in;
  ++link.total_in;
  link.max_q_len = std::max(link.max_q_len, link.q_len());
  start_service(link);
}

void SimNet::enqueue(const BrokerId& from, const BrokerId& to, Message msg) {
  LinkState& link = link_mut(from, to);
  ++msg.hops;
  ++report_.im_counts[phase_of(msg.kind)];
  if (msg.kind == MessageKind::Pub) ++report_.pub_insertions[from][now_ / config_.window_us];
  if (config_.record_hops) {
    report_.hops.push_back(HopRecord{now_, msg.kind, key_of(msg), from, to, msg.civ ? msg.civ->to_string() : ""});
  }
  if (config_.trace) {
    std::ostringstream line;
    line << now_ << " enqueue " << to_string(msg.kind) << ' ' << key_of(msg) << ' ' << link_name(from, to);
    if (msg.civ) line << " civ=" << msg.civ->to_string();
    trace_.push_back(line.str());
  }
  put_on_queue(link, QueuedItem{std::move(msg), now_});
}

StepResult SimNet::step() {
  if (pending_work_ == 0) return {true, std::nullopt};
  Pending p = events_.top();
  events_.pop();
  now_ = p.event.time;
  ++report_.events;
  if (p.event.kind != EventKind::WindowRollover) --pending_work_;

  switch (p.event.kind) {
    case EventKind::WindowRollover: on_rollover(); break;
    case EventKind::LinkControl: on_control(std::get<ControlSubject>(p.subject)); break;
    case EventKind::Dequeue: on_dequeue(std::get<DequeueSubject>(p.subject)); break;
    case EventKind::Deliver: on_deliver(std::get<DeliverSubject>(p.subject)); break;
    case EventKind::ClientAction: on_client(std::get<ClientSubject>(p.subject)); break;
  }
  return {false, p.event};
}

RunReport SimNet::run_until_quiescent(Micros max_time) {
  if (max_time <= 0) throw Error(ErrorCode::InvalidConfig, "max_time must be positive");
  while (pending_work_ > 0) {
    if (events_.top().event.time > max_time) throw TimeLimitExceeded(max_time, report());
    step();
  }
  RunReport out = report();
  out.quiescent = true;
  return out;
}

void SimNet::on_rollover() {
  rollover_scheduled_ = false;
  for (auto& [key, link] : links_) {
    broker(key.first).set_link_status(key.second, LinkStatus{link.q_len(), link.q_in, link.q_out});
    link.q_in = 0;
    link.q_out = 0;
  }
  if (!config_.watch_links.empty()) report_.series_times.push_back(now_);
  for (const auto& key : config_.watch_links) {
    report_.link_series[link_name(key.first, key.second)].push_back(links_.at(key).q_len());
  }
  if (pending_work_ > 0) ensure_rollover();
}

void SimNet::on_control(const ControlSubject& s) {
  LinkState& link = link_mut(s.link.first, s.link.second);
  link.service_rate = s.rate;
  for (std::int64_t i = 0; i < s.backlog; ++i) {
    ++link.background;
    put_on_queue(link, QueuedItem{std::nullopt, now_});
  }
  start_service(link);
  if (config_.trace) {
    trace_.push_back(std::to_string(now_) + " link_control " + link_name(s.link.first, s.link.second) +
                     " rate=" + std::to_string(s.rate) + " backlog=" + std::to_string(s.backlog));
  }
}

void SimNet::on_dequeue(const DequeueSubject& s) {
  LinkState& link = link_mut(s.link.first, s.link.second);
  link.busy = false;
  QueuedItem item = std::move(link.queue.front());
  link.queue.pop_front();
  ++link.q_out;
  ++link.total_out;
  if (item.msg) {
    const Broker& receiver = broker(link.to);
    const Micros cost = matching_cost(receiver, *item.msg);
    matching_totals_[link.to] += cost;
    push(now_ + link.latency_us + cost, EventKind::Deliver, DeliverSubject{link.to, std::move(*item.msg)});
  }
  start_service(link);
}

void SimNet::on_deliver(DeliverSubject& s) {
  if (config_.trace) {
    std::ostringstream line;
    line << now_ << " deliver " << to_string(s.msg.kind) << ' ' << key_of(s.msg) << ' ' << to_string(s.to);
    if (s.msg.civ) line << " civ=" << s.msg.civ->to_string();
    trace_.push_back(line.str());
  }
  record_arrival(s.to, s.msg);
  dispatch(broker(s.to), s.msg);
}

void SimNet::on_client(ClientSubject& s) {
  const ClientId client = std::get<ClientId>(s.msg.last_hop);
  const BrokerId host = clients_.at(client);
  switch (s.msg.kind) {
    case MessageKind::Pub:
      report_.publications[to_string(s.msg.pub_key())] = PublicationRecord{now_, host};
      break;
    case MessageKind::Adv:
      report_.advertisements[client.value].issued_at = now_;
      break;
    case MessageKind::Sub:
      report_.subscriptions[s.msg.subscription().id.value].issued_at = now_;
      break;
    default: break;
  }
  if (config_.trace) {
    trace_.push_back(std::to_string(now_) + " client " + std::string(to_string(s.msg.kind)) + ' ' + key_of(s.msg) +
                     ' ' + client.value + '@' + to_string(host));
  }
  record_arrival(host, s.msg);
  dispatch(broker(host), s.msg);
}

void SimNet::record_arrival(const BrokerId& b, const Message& msg) {
  if (msg.kind == MessageKind::Adv) {
    report_.advertisements[msg.advertisement().publisher.value].reached.emplace(b, now_);
  } else if (msg.kind == MessageKind::Sub) {
    report_.subscriptions[msg.subscription().id.value].reached.emplace(b, now_);
  }
}

void SimNet::dispatch(Broker& b, const Message& msg) {
  if (msg.kind == MessageKind::Pub && !handled_pubs_.emplace(to_string(msg.pub_key()), b.id()).second) {
    ++report_.duplicate_handling;
  }
  std::vector<Message> outs;
  try {
    outs = b.handle(msg);
  } catch (const Error& e) {
    report_.errors.push_back(BrokerError{now_, b.id(), e.what()});
    if (config_.trace) trace_.push_back(std::to_string(now_) + " error " + to_string(b.id()) + ' ' + e.what());
    return;
  }
  for (auto& out : outs) {
    if (const auto* next = std::get_if<BrokerId>(&out.next_hop)) {
      const BrokerId to = *next;  // `out` is moved below
      enqueue(b.id(), to, std::move(out));
      continue;
    }
    if (out.kind != MessageKind::Pub) continue;
    const std::string subscriber = std::get<ClientId>(out.next_hop).value;
    const std::string key = to_string(out.pub_key());
    DeliveryRecord rec;
    rec.subscriber = subscriber;
    rec.pub = key;
    rec.broker = b.id();
    rec.delivered_at = now_;
    rec.hops = out.hops;
    if (auto it = report_.publications.find(key); it != report_.publications.end()) {
      rec.published_at = it->second.published_at;
      rec.publisher_cluster = it->second.host.cluster;
    }
    if (config_.trace) trace_.push_back(std::to_string(now_) + " notify " + key + ' ' + subscriber);
    report_.deliveries.push_back(std::move(rec));
  }
}

RunReport SimNet::report() const {
  RunReport out = report_;
  out.mode = config_.mode;
  out.seed = config_.seed;
  out.window_us = config_.window_us;
  out.tau = config_.tau;
  out.path_selection_us = config_.path_selection_us;
  out.end_time = now_;
  out.quiescent = pending_work_ == 0;
  out.shape.brokers = scot_->broker_count();
  out.shape.clusters = scot_->cluster_count();
  out.shape.regions = scot_->region_count();
  out.shape.advertisements = report_.advertisements.size();
  out.shape.subscriptions = report_.subscriptions.size();
  out.shape.publications = report_.publications.size();
  for (const auto& [key, link] : links_) {
    out.links.push_back(LinkSummary{link.from, link.to, link.type, link.total_in, link.total_out, link.background,
                                    link.max_q_len, link.q_len()});
  }
  for (const auto& [id, b] : brokers_) {
    BrokerSummary s;
    s.clt_entries = b->clt().size();
    s.prt_entries = b->prt().size();
    auto it = matching_totals_.find(id);
    s.matching_cost = it == matching_totals_.end() ? 0 : it->second;
    s.routing = b->stats();
    out.brokers[id] = s;
  }
  return out;
}

}  // namespace scot
