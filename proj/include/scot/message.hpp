#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "scot/civ.hpp"
#include "scot/content.hpp"
#include "scot/topology.hpp"

namespace scot {

/// Advertisement UID: host broker plus that broker's running sequence number.
struct AdvUid {
  BrokerId host;
  std::uint64_t seq = 0;

  auto operator<=>(const AdvUid&) const = default;
  bool operator==(const AdvUid&) const = default;
};

std::string to_string(const AdvUid& uid);

/// Either a broker or a client; last_hop / next_hop of a message.
using Endpoint = std::variant<BrokerId, ClientId>;

std::string to_string(const Endpoint& e);
inline bool is_client(const Endpoint& e) { return std::holds_alternative<ClientId>(e); }
inline bool is_broker(const Endpoint& e) { return std::holds_alternative<BrokerId>(e); }

enum class MessageKind { Adv, Unadv, Sub, Unsub, Pub, CivSet, CivUnset };

std::string_view to_string(MessageKind kind);

/// Identity of a publication across copies.
struct PubKey {
  ClientId publisher;
  std::uint64_t seqno = 0;

  auto operator<=>(const PubKey&) const = default;
  bool operator==(const PubKey&) const = default;
};

std::string to_string(const PubKey& key);

struct Message {
  using Payload = std::variant<std::monostate, Advertisement, Subscription, SubscriptionId, Publication, ClientId>;

  MessageKind kind = MessageKind::Pub;
  Payload payload;
  std::optional<Civ> civ;
  std::optional<Subscription> piggyback_sub;
  std::optional<AdvUid> adv_uid;
  Endpoint last_hop;
  Endpoint next_hop;
  /// Overlay hops travelled so far (maintained by the network).
  int hops = 0;

  static Message advertise(Advertisement adv);
  static Message unadvertise(ClientId publisher);
  static Message subscribe(Subscription sub);
  static Message unsubscribe(SubscriptionId id, ClientId subscriber);
  static Message publish(Publication pub);

  const Advertisement& advertisement() const { return std::get<Advertisement>(payload); }
  const Subscription& subscription() const { return std::get<Subscription>(payload); }
  const SubscriptionId& subscription_id() const { return std::get<SubscriptionId>(payload); }
  const Publication& publication() const { return std::get<Publication>(payload); }

  /// Client that issued the message (publisher or subscriber), when known.
  std::optional<ClientId> origin_client() const;
  PubKey pub_key() const { return {publication().publisher, publication().seqno}; }
};

}  // namespace scot
