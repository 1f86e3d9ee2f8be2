#include "scot/content.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

namespace scot {

std::string to_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::ostringstream out;
  out << std::get<double>(v);
  return out.str();
}

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Eq: return "=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
  }
  return "?";
}

Op parse_op(std::string_view text) {
  if (text == "=" || text == "eq") return Op::Eq;
  if (text == "<" || text == "lt") return Op::Lt;
  if (text == "<=" || text == "le") return Op::Le;
  if (text == ">" || text == "gt") return Op::Gt;
  if (text == ">=" || text == "ge") return Op::Ge;
  throw Error(ErrorCode::InvalidPredicate, "unknown operator '" + std::string(text) + "'");
}

bool satisfies(const Value& value, const Predicate& p) {
  if (value.index() != p.bound.index()) return false;
  if (const auto* s = std::get_if<std::string>(&value)) {
    return p.op == Op::Eq && *s == std::get<std::string>(p.bound);
  }
  const double x = std::get<double>(value);
  const double b = std::get<double>(p.bound);
  switch (p.op) {
    case Op::Eq: return x == b;
    case Op::Lt: return x < b;
    case Op::Le: return x <= b;
    case Op::Gt: return x > b;
    case Op::Ge: return x >= b;
  }
  return false;
}

namespace {

/// Feasible set of one attribute: a numeric interval or a single string.
struct Domain {
  bool has_numeric = false;
  bool has_string = false;
  double lo = -std::numeric_limits<double>::infinity();
  bool lo_open = false;
  double hi = std::numeric_limits<double>::infinity();
  bool hi_open = false;
  std::optional<std::string> text;
  bool contradictory = false;

  void narrow(const Predicate& p) {
    if (const auto* s = std::get_if<std::string>(&p.bound)) {
      has_string = true;
      if (p.op != Op::Eq || (text && *text != *s)) contradictory = true;
      text = *s;
      return;
    }
    has_numeric = true;
    const double b = std::get<double>(p.bound);
    auto raise_lo = [this](double v, bool open) {
      if (v > lo || (v == lo && open)) {
        lo = v;
        lo_open = open;
      }
    };
    auto lower_hi = [this](double v, bool open) {
      if (v < hi || (v == hi && open)) {
        hi = v;
        hi_open = open;
      }
    };
    switch (p.op) {
      case Op::Eq: raise_lo(b, false); lower_hi(b, false); break;
      case Op::Lt: lower_hi(b, true); break;
      case Op::Le: lower_hi(b, false); break;
      case Op::Gt: raise_lo(b, true); break;
      case Op::Ge: raise_lo(b, false); break;
    }
  }

  bool empty() const {
    if (contradictory || (has_numeric && has_string)) return true;
    if (!has_numeric) return false;
    if (lo < hi) return false;
    return !(lo == hi && !lo_open && !hi_open);
  }
};

bool conjunction_satisfiable(const std::vector<Predicate>& a, const std::vector<Predicate>& b) {
  std::map<std::string, Domain> domains;
  for (const auto& p : a) domains[p.name].narrow(p);
  for (const auto& p : b) domains[p.name].narrow(p);
  return std::none_of(domains.begin(), domains.end(), [](const auto& kv) { return kv.second.empty(); });
}

bool all_satisfied(const Publication& p, const std::vector<Predicate>& predicates) {
  return std::all_of(predicates.begin(), predicates.end(), [&p](const Predicate& pred) {
    auto it = p.attrs.find(pred.name);
    return it != p.attrs.end() && satisfies(it->second, pred);
  });
}

}  // namespace

void validate_predicates(const std::vector<Predicate>& predicates) {
  struct Count {
    int eq = 0, lower = 0, upper = 0;
  };
  std::map<std::string, Count> counts;
  for (const auto& p : predicates) {
    if (p.name.empty()) throw Error(ErrorCode::InvalidPredicate, "empty attribute name");
    if (std::holds_alternative<std::string>(p.bound) && p.op != Op::Eq) {
      throw Error(ErrorCode::InvalidPredicate, "string attribute '" + p.name + "' supports '=' only");
    }
    auto& c = counts[p.name];
    if (p.op == Op::Eq) ++c.eq;
    if (p.op == Op::Gt || p.op == Op::Ge) ++c.lower;
    if (p.op == Op::Lt || p.op == Op::Le) ++c.upper;
    if (c.eq > 1 || c.lower > 1 || c.upper > 1 || (c.eq && (c.lower || c.upper))) {
      throw Error(ErrorCode::InvalidPredicate, "more than one range pair on '" + p.name + "'");
    }
  }
  if (!satisfiable(predicates)) throw Error(ErrorCode::InvalidPredicate, "contradictory conjunction");
}

bool satisfiable(const std::vector<Predicate>& predicates) {
  return conjunction_satisfiable(predicates, {});
}

bool pub_matches_sub(const Publication& p, const Subscription& s) { return all_satisfied(p, s.predicates); }

bool adv_overlaps_sub(const Advertisement& a, const Subscription& s) {
  return conjunction_satisfiable(a.predicates, s.predicates);
}

bool pub_conforms_adv(const Publication& p, const Advertisement& a) { return all_satisfied(p, a.predicates); }

}  // namespace scot
