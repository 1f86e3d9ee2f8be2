#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "scot/error.hpp"

namespace scot {

/// Numeric values and string values never compare across kinds.
using Value = std::variant<double, std::string>;

std::string to_string(const Value& v);

struct ClientId {
  std::string value;
  auto operator<=>(const ClientId&) const = default;
  bool operator==(const ClientId&) const = default;
};

struct SubscriptionId {
  std::string value;
  auto operator<=>(const SubscriptionId&) const = default;
  bool operator==(const SubscriptionId&) const = default;
};

enum class Op { Eq, Lt, Le, Gt, Ge };

std::string_view to_string(Op op);
Op parse_op(std::string_view text);

struct Predicate {
  std::string name;
  Op op = Op::Eq;
  Value bound;

  bool operator==(const Predicate&) const = default;
};

/// True iff `value` satisfies the predicate; kind mismatch never satisfies.
bool satisfies(const Value& value, const Predicate& p);

struct AttributeValue {
  std::string name;
  Value value;
};

struct Publication {
  std::map<std::string, Value> attrs;
  ClientId publisher;
  std::uint64_t seqno = 0;
};

struct Subscription {
  SubscriptionId id;
  std::vector<Predicate> predicates;
  ClientId subscriber;
};

struct Advertisement {
  std::vector<Predicate> predicates;
  ClientId publisher;
};

/// Checks op/bound compatibility, at most one lower and one upper bound (or a
/// single equality) per attribute, and that the conjunction is satisfiable.
/// Throws InvalidPredicate.
void validate_predicates(const std::vector<Predicate>& predicates);

/// Conjunction satisfiability of an arbitrary predicate set.
bool satisfiable(const std::vector<Predicate>& predicates);

bool pub_matches_sub(const Publication& p, const Subscription& s);
bool adv_overlaps_sub(const Advertisement& a, const Subscription& s);
bool pub_conforms_adv(const Publication& p, const Advertisement& a);

}  // namespace scot
