#include "scot/message.hpp"

namespace scot {

std::string to_string(const AdvUid& uid) { return to_string(uid.host) + "#" + std::to_string(uid.seq); }

std::string to_string(const Endpoint& e) {
  if (const auto* b = std::get_if<BrokerId>(&e)) return to_string(*b);
  return std::get<ClientId>(e).value;
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Adv: return "adv";
    case MessageKind::Unadv: return "unadv";
    case MessageKind::Sub: return "sub";
    case MessageKind::Unsub: return "unsub";
    case MessageKind::Pub: return "pub";
    case MessageKind::CivSet: return "civ_set";
    case MessageKind::CivUnset: return "civ_unset";
  }
  return "?";
}

std::string to_string(const PubKey& key) { return key.publisher.value + ":" + std::to_string(key.seqno); }

Message Message::advertise(Advertisement adv) {
  Message m;
  m.kind = MessageKind::Adv;
  m.last_hop = adv.publisher;
  m.payload = std::move(adv);
  return m;
}

Message Message::unadvertise(ClientId publisher) {
  Message m;
  m.kind = MessageKind::Unadv;
  m.last_hop = publisher;
  m.payload = std::move(publisher);
  return m;
}

Message Message::subscribe(Subscription sub) {
  Message m;
  m.kind = MessageKind::Sub;
  m.last_hop = sub.subscriber;
  m.payload = std::move(sub);
  return m;
}

Message Message::unsubscribe(SubscriptionId id, ClientId subscriber) {
  Message m;
  m.kind = MessageKind::Unsub;
  m.last_hop = std::move(subscriber);
  m.payload = std::move(id);
  return m;
}

Message Message::publish(Publication pub) {
  Message m;
  m.kind = MessageKind::Pub;
  m.last_hop = pub.publisher;
  m.payload = std::move(pub);
  return m;
}

std::optional<ClientId> Message::origin_client() const {
  if (const auto* a = std::get_if<Advertisement>(&payload)) return a->publisher;
  if (const auto* s = std::get_if<Subscription>(&payload)) return s->subscriber;
  if (const auto* p = std::get_if<Publication>(&payload)) return p->publisher;
  if (const auto* c = std::get_if<ClientId>(&payload)) return *c;
  return std::nullopt;
}

}  // namespace scot
