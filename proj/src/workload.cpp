#include "scot/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "scot/simnet.hpp"

namespace scot {

using nlohmann::json;

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::string_view to_string(AdvertisementStyle style) {
  return style == AdvertisementStyle::Domain ? "domain" : "point";
}

AdvertisementStyle parse_advertisement_style(std::string_view text) {
  if (text == "domain") return AdvertisementStyle::Domain;
  if (text == "point") return AdvertisementStyle::Point;
  throw Error(ErrorCode::InvalidConfig, "advertisement style must be 'domain' or 'point'");
}

void WorkloadConfig::validate() const {
  if (n_publishers == 0 || n_subscribers == 0 || n_symbols == 0 || n_attributes == 0) {
    throw Error(ErrorCode::InvalidConfig, "workload counts must be positive");
  }
  if (!(selectivity > 0 && selectivity <= 1)) throw Error(ErrorCode::InvalidConfig, "selectivity must be in (0,1]");
  if (!(pub_rate > 0)) throw Error(ErrorCode::InvalidConfig, "pub_rate must be positive");
  if (control_spacing_us < 0 || control_start_us < 0) throw Error(ErrorCode::InvalidConfig, "negative time");
  if (!(tolerance > 0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be positive");
  if (calibration_samples == 0) throw Error(ErrorCode::InvalidConfig, "calibration_samples must be positive");
  const Micros control_end =
      control_start_us + control_spacing_us * static_cast<Micros>(n_publishers + n_subscribers);
  if (pubs_per_publisher > 0 && pub_start_us <= control_end) {
    throw Error(ErrorCode::InvalidConfig, "pub_start_us must follow the last control action");
  }
}

void BurstConfig::validate() const {
  if (hrp_total == 0) throw Error(ErrorCode::InvalidConfig, "hrp_total must be positive");
  if (hrp_rates.empty()) throw Error(ErrorCode::InvalidConfig, "hrp_rates must not be empty");
  for (double r : hrp_rates) {
    if (!(r > 0)) throw Error(ErrorCode::InvalidConfig, "burst rates must be positive");
  }
  if (!(matching_fraction > 0 && matching_fraction <= 1)) {
    throw Error(ErrorCode::InvalidConfig, "matching_fraction must be in (0,1]");
  }
  if (start_us <= control_at_us) throw Error(ErrorCode::InvalidConfig, "burst must start after its control actions");
}

namespace {

constexpr const char* kSymbol = "symbol";

AttributeSchema make_schema(const WorkloadConfig& cfg) {
  AttributeSchema schema;
  if (cfg.basis.empty()) {
    for (std::size_t i = 0; i < cfg.n_symbols; ++i) {
      std::ostringstream name;
      name << "SYM" << i;
      schema.symbols.push_back(name.str());
    }
    for (std::size_t i = 1; i < cfg.n_attributes; ++i) {
      const std::string name = "a" + std::to_string(i);
      schema.numeric.push_back(name);
      schema.domain[name] = {0.0, 100.0};
    }
    return schema;
  }
  std::set<std::string> symbols;
  for (const auto& row : cfg.basis) {
    for (const auto& [name, value] : row) {
      if (const auto* s = std::get_if<std::string>(&value)) {
        if (name != kSymbol) throw Error(ErrorCode::ParseError, "string column other than symbol: " + name);
        symbols.insert(*s);
      } else {
        const double x = std::get<double>(value);
        auto [it, fresh] = schema.domain.emplace(name, std::pair{x, x});
        if (!fresh) {
          it->second.first = std::min(it->second.first, x);
          it->second.second = std::max(it->second.second, x);
        }
      }
    }
  }
  schema.symbols.assign(symbols.begin(), symbols.end());
  for (const auto& [name, range] : schema.domain) schema.numeric.push_back(name);
  if (schema.symbols.empty()) throw Error(ErrorCode::ParseError, "basis has no symbol column");
  return schema;
}

/// Draws one publication body (symbol plus numeric values).
std::map<std::string, Value> draw_point(const WorkloadConfig& cfg, const AttributeSchema& schema, Rng& rng,
                                        const std::string* symbol) {
  if (!cfg.basis.empty()) {
    if (!symbol) return cfg.basis[rng.below(cfg.basis.size())];
    std::vector<const BasisRow*> rows;
    for (const auto& row : cfg.basis) {
      auto it = row.find(kSymbol);
      if (it != row.end() && it->second == Value{*symbol}) rows.push_back(&row);
    }
    return *rows[rng.below(rows.size())];
  }
  std::map<std::string, Value> attrs;
  attrs[kSymbol] = symbol ? *symbol : schema.symbols[rng.below(schema.symbols.size())];
  for (const auto& name : schema.numeric) {
    const auto [lo, hi] = schema.domain.at(name);
    attrs[name] = rng.uniform(lo, hi);
  }
  return attrs;
}

/// Range predicates of width `fraction` of each numeric domain; `offsets` in [0,1)
/// place each range inside its domain.
std::vector<Predicate> range_predicates(const AttributeSchema& schema, double fraction,
                                        const std::vector<double>& offsets) {
  std::vector<Predicate> preds;
  for (std::size_t i = 0; i < schema.numeric.size(); ++i) {
    const auto& name = schema.numeric[i];
    const auto [lo, hi] = schema.domain.at(name);
    const double width = fraction * (hi - lo);
    const double start = lo + offsets[i] * (hi - lo - width);
    preds.push_back({name, Op::Ge, start});
    preds.push_back({name, Op::Le, start + width});
  }
  return preds;
}

bool in_ranges(const std::map<std::string, Value>& attrs, const AttributeSchema& schema, double fraction,
               const std::vector<double>& offsets) {
  for (std::size_t i = 0; i < schema.numeric.size(); ++i) {
    const auto& name = schema.numeric[i];
    const auto [lo, hi] = schema.domain.at(name);
    const double width = fraction * (hi - lo);
    const double start = lo + offsets[i] * (hi - lo - width);
    const double x = std::get<double>(attrs.at(name));
    if (x < start || x > start + width) return false;
  }
  return true;
}

/// Binary search for the range width whose selectivity over the generated
/// publications and subscription placements hits the target. Large corpora are
/// calibrated on an evenly strided subset of at most `calibration_samples` of each.
double calibrate(const WorkloadConfig& cfg, const AttributeSchema& schema,
                 const std::vector<std::map<std::string, Value>>& all_pubs,
                 const std::vector<std::vector<double>>& all_offsets) {
  auto strided = [&](const auto& v) {
    std::remove_cvref_t<decltype(v)> out;
    const std::size_t step = std::max<std::size_t>(1, (v.size() + cfg.calibration_samples - 1) / cfg.calibration_samples);
    for (std::size_t i = 0; i < v.size(); i += step) out.push_back(v[i]);
    return out;
  };
  const auto pubs = strided(all_pubs);
  const auto offsets = strided(all_offsets);
  if (pubs.empty() || offsets.empty()) return 1.0;
  auto measure = [&](double fraction) {
    std::size_t hits = 0;
    for (const auto& o : offsets) {
      for (const auto& p : pubs) hits += in_ranges(p, schema, fraction, o) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(pubs.size() * offsets.size());
  };

  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (measure(mid) < cfg.selectivity ? lo : hi) = mid;
  }
  // The closer of the two brackets.
  const double a_lo = measure(lo);
  const double a_hi = measure(hi);
  const bool use_lo = std::abs(a_lo - cfg.selectivity) < std::abs(a_hi - cfg.selectivity);
  const double fraction = use_lo ? lo : hi;
  const double achieved = use_lo ? a_lo : a_hi;
  if (std::abs(achieved - cfg.selectivity) > cfg.tolerance * cfg.selectivity) {
    std::ostringstream msg;
    msg << "selectivity " << cfg.selectivity << " not reachable (best " << achieved << ")";
    throw Error(ErrorCode::InfeasibleSelectivity, msg.str());
  }
  return fraction;
}

void sort_actions(WorkloadScript& script) {
  std::stable_sort(script.actions.begin(), script.actions.end(),
                   [](const ScriptAction& a, const ScriptAction& b) { return a.time < b.time; });
}

}  // namespace

WorkloadScript generate(const WorkloadConfig& cfg, const Scot& scot) {
  cfg.validate();
  const AttributeSchema schema = make_schema(cfg);
  Rng rng(cfg.seed);
  const std::vector<BrokerId> brokers = scot.brokers();

  WorkloadScript script;
  Micros t = cfg.control_start_us;
  std::vector<std::map<std::string, Value>> corpus;

  for (std::size_t i = 0; i < cfg.n_publishers; ++i) {
    const ClientId client{"P" + std::to_string(i)};
    const BrokerId host = brokers[rng.below(brokers.size())];
    const std::string symbol = schema.symbols[rng.below(schema.symbols.size())];
    Advertisement adv{{}, client};
    std::map<std::string, Value> point;
    if (cfg.adv_style == AdvertisementStyle::Point) {
      point = draw_point(cfg, schema, rng, &symbol);
      for (const auto& [name, value] : point) adv.predicates.push_back({name, Op::Eq, value});
    } else {
      adv.predicates.push_back({kSymbol, Op::Eq, symbol});
      for (const auto& name : schema.numeric) {
        const auto [lo, hi] = schema.domain.at(name);
        adv.predicates.push_back({name, Op::Ge, lo});
        adv.predicates.push_back({name, Op::Le, hi});
      }
    }
    script.actions.push_back({t, client.value, host, Message::advertise(adv)});
    t += cfg.control_spacing_us;

    const Micros interval = static_cast<Micros>(std::llround(60e6 / cfg.pub_rate));
    const Micros offset = static_cast<Micros>(rng.below(static_cast<std::uint64_t>(std::max<Micros>(interval, 1))));
    for (std::size_t k = 0; k < cfg.pubs_per_publisher; ++k) {
      Publication pub;
      pub.publisher = client;
      pub.seqno = k;
      pub.attrs = cfg.adv_style == AdvertisementStyle::Point ? point : draw_point(cfg, schema, rng, &symbol);
      corpus.push_back(pub.attrs);
      const Micros at = cfg.pub_start_us + offset + static_cast<Micros>(k) * interval;
      script.actions.push_back({at, client.value, host, Message::publish(std::move(pub))});
    }
  }

  // Subscription placement first, range width second: the width is tuned
  // against exactly the publications and offsets of this script.
  std::vector<BrokerId> sub_hosts;
  std::vector<std::vector<double>> sub_offsets;
  for (std::size_t i = 0; i < cfg.n_subscribers; ++i) {
    sub_hosts.push_back(brokers[rng.below(brokers.size())]);
    std::vector<double> offsets;
    for (std::size_t k = 0; k < schema.numeric.size(); ++k) offsets.push_back(rng.unit());
    sub_offsets.push_back(std::move(offsets));
  }
  if (corpus.empty()) {
    // Without publications, calibrate against a sample drawn from the schema.
    Rng sample_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < cfg.calibration_samples; ++i) corpus.push_back(draw_point(cfg, schema, sample_rng, nullptr));
  }
  const double fraction = calibrate(cfg, schema, corpus, sub_offsets);
  script.range_fraction = fraction;

  for (std::size_t i = 0; i < cfg.n_subscribers; ++i) {
    const ClientId client{"S" + std::to_string(i)};
    Subscription sub{SubscriptionId{client.value + ".0"}, range_predicates(schema, fraction, sub_offsets[i]), client};
    script.actions.push_back({t, client.value, sub_hosts[i], Message::subscribe(std::move(sub))});
    t += cfg.control_spacing_us;
  }

  sort_actions(script);
  return script;
}

std::vector<WorkloadScript> generate_burst(const BurstConfig& cfg, const WorkloadScript& base, const Scot& scot) {
  cfg.validate();
  Rng rng(cfg.seed ^ 0x5bd1e995ULL);

  // Numeric attributes of the base corpus and the largest value they reach;
  // the HRP publishes above it so no base subscription matches it.
  std::set<std::string> numeric;
  double ceiling = 0.0;
  std::size_t base_subscribers = 0;
  auto note = [&](const std::string& name, const Value& v) {
    if (const auto* x = std::get_if<double>(&v)) {
      numeric.insert(name);
      ceiling = std::max(ceiling, *x);
    }
  };
  for (const auto& a : base.actions) {
    switch (a.message.kind) {
      case MessageKind::Pub:
        for (const auto& [name, v] : a.message.publication().attrs) note(name, v);
        break;
      case MessageKind::Adv:
        for (const auto& p : a.message.advertisement().predicates) note(p.name, p.bound);
        break;
      case MessageKind::Sub:
        ++base_subscribers;
        for (const auto& p : a.message.subscription().predicates) note(p.name, p.bound);
        break;
      default: break;
    }
  }

  const std::vector<BrokerId> brokers = scot.brokers();
  const BrokerId host = cfg.hrp_host ? *cfg.hrp_host : brokers[rng.below(brokers.size())];
  if (!scot.contains(host)) throw Error(ErrorCode::UnknownBroker, to_string(host));

  const auto matching =
      static_cast<std::size_t>(std::llround(cfg.matching_fraction * static_cast<double>(base_subscribers)));
  const auto clusters = static_cast<std::size_t>(scot.cluster_count());
  if (matching < clusters) {
    throw Error(ErrorCode::PlacementInfeasible, std::to_string(matching) + " matching subscribers cannot cover " +
                                                    std::to_string(clusters) + " clusters");
  }

  const ClientId hrp{"HRP"};
  const double lo = std::floor(ceiling) + 1.0;
  const double hi = lo + 1.0;
  Advertisement adv{{{kSymbol, Op::Eq, std::string("HRP")}}, hrp};
  for (const auto& name : numeric) {
    adv.predicates.push_back({name, Op::Ge, lo});
    adv.predicates.push_back({name, Op::Le, hi});
  }

  WorkloadScript control = base;
  control.actions.push_back({cfg.control_at_us, hrp.value, host, Message::advertise(adv)});
  for (std::size_t k = 0; k < matching; ++k) {
    std::vector<BrokerId> candidates;
    for (const auto& b : scot.cluster(static_cast<int>(k % clusters))) {
      if (b != host) candidates.push_back(b);
    }
    if (candidates.empty()) {
      throw Error(ErrorCode::PlacementInfeasible, "cluster " + std::to_string(k % clusters) +
                                                      " has no broker other than the HRP host");
    }
    const ClientId client{"H" + std::to_string(k)};
    Subscription sub{SubscriptionId{client.value + ".0"}, {{kSymbol, Op::Eq, std::string("HRP")}}, client};
    control.actions.push_back({cfg.control_at_us + static_cast<Micros>(k + 1) * 1000, client.value,
                               candidates[rng.below(candidates.size())], Message::subscribe(std::move(sub))});
  }

  std::vector<WorkloadScript> out;
  for (double rate : cfg.hrp_rates) {
    WorkloadScript script = control;
    Micros last = cfg.start_us;
    for (std::size_t i = 0; i < cfg.hrp_total; ++i) {
      Publication pub;
      pub.publisher = hrp;
      pub.seqno = i;
      pub.attrs[kSymbol] = std::string("HRP");
      for (const auto& name : numeric) pub.attrs[name] = rng.uniform(lo, hi);
      last = cfg.start_us + static_cast<Micros>(std::llround(static_cast<double>(i) * 60e6 / rate));
      script.actions.push_back({last, hrp.value, host, Message::publish(std::move(pub))});
    }
    script.markers["burst_start"] = cfg.start_us;
    script.markers["burst_end"] = last;
    sort_actions(script);
    out.push_back(std::move(script));
  }
  return out;
}

std::vector<BasisRow> parse_basis_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(l);
    while (std::getline(s, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty CSV");
  const auto header = split(line);
  if (header.size() != 7) throw Error(ErrorCode::ParseError, "CSV header must name 7 columns");
  std::vector<BasisRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 7 cells");
    }
    BasisRow row;
    row[kSymbol] = cells[0];
    for (std::size_t i = 1; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        const double x = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        row[header[i]] = x;
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + cells[i] + "' is not a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "CSV has no data rows");
  return rows;
}

double measured_selectivity(const WorkloadScript& script) {
  std::vector<const Publication*> pubs;
  std::vector<const Subscription*> subs;
  for (const auto& a : script.actions) {
    if (a.message.kind == MessageKind::Pub) pubs.push_back(&a.message.publication());
    if (a.message.kind == MessageKind::Sub) subs.push_back(&a.message.subscription());
  }
  if (pubs.empty() || subs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto* p : pubs) {
    for (const auto* s : subs) hits += pub_matches_sub(*p, *s) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(pubs.size() * subs.size());
}

std::set<std::pair<std::string, std::string>> expected_deliveries(const WorkloadScript& script) {
  std::set<std::pair<std::string, std::string>> out;
  std::map<SubscriptionId, Subscription> active;
  for (const auto& a : script.actions) {
    switch (a.message.kind) {
      case MessageKind::Sub: active[a.message.subscription().id] = a.message.subscription(); break;
      case MessageKind::Unsub: active.erase(a.message.subscription_id()); break;
      case MessageKind::Pub:
        for (const auto& [id, sub] : active) {
          if (pub_matches_sub(a.message.publication(), sub)) {
            out.emplace(sub.subscriber.value, to_string(a.message.pub_key()));
          }
        }
        break;
      default: break;
    }
  }
  return out;
}

void load_into(const WorkloadScript& script, SimNet& net) {
  for (const auto& a : script.actions) net.attach_client(ClientId{a.client}, a.broker);
  for (const auto& a : script.actions) net.schedule_client(a.time, a.message);
  for (const auto& [name, at] : script.markers) net.mark(name, at);
}

// ---------------------------------------------------------------------------
// JSON form: {"schema_version": 1, "actions": [{time, client, broker, action, payload}], "markers": {...}}

namespace {

json value_json(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<double>(v);
}

Value value_from(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.get<double>();
  throw Error(ErrorCode::ParseError, "attribute value must be a number or string");
}

std::string action_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::Adv: return "advertise";
    case MessageKind::Unadv: return "unadvertise";
    case MessageKind::Sub: return "subscribe";
    case MessageKind::Unsub: return "unsubscribe";
    case MessageKind::Pub: return "publish";
    default: break;
  }
  throw Error(ErrorCode::InvalidConfig, "not a client action: " + std::string(to_string(kind)));
}

}  // namespace

json predicates_to_json(const std::vector<Predicate>& predicates) {
  json out = json::array();
  for (const auto& p : predicates) {
    out.push_back({{"name", p.name}, {"op", std::string(to_string(p.op))}, {"value", value_json(p.bound)}});
  }
  return out;
}

std::vector<Predicate> predicates_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "predicates must be an array");
  std::vector<Predicate> out;
  for (const auto& p : j) {
    out.push_back({p.at("name").get<std::string>(), parse_op(p.at("op").get<std::string>()), value_from(p.at("value"))});
  }
  return out;
}

json to_json_value(const WorkloadScript& script) {
  json actions = json::array();
  for (const auto& a : script.actions) {
    json payload = json::object();
    const Message& m = a.message;
    switch (m.kind) {
      case MessageKind::Adv: payload["predicates"] = predicates_to_json(m.advertisement().predicates); break;
      case MessageKind::Sub:
        payload["id"] = m.subscription().id.value;
        payload["predicates"] = predicates_to_json(m.subscription().predicates);
        break;
      case MessageKind::Unsub: payload["id"] = m.subscription_id().value; break;
      case MessageKind::Pub: {
        payload["seqno"] = m.publication().seqno;
        json attrs = json::object();
        for (const auto& [name, v] : m.publication().attrs) attrs[name] = value_json(v);
        payload["attrs"] = attrs;
        break;
      }
      default: break;
    }
    actions.push_back({{"time", a.time},
                       {"client", a.client},
                       {"broker", to_string(a.broker)},
                       {"action", action_name(m.kind)},
                       {"payload", payload}});
  }
  return {{"schema_version", 1}, {"actions", actions}, {"markers", script.markers},
          {"range_fraction", script.range_fraction}};
}

std::string to_json(const WorkloadScript& script) { return to_json_value(script).dump(2) + "\n"; }

WorkloadScript workload_from_json(const json& j) {
  try {
    if (j.value("schema_version", 0) != 1) throw Error(ErrorCode::InvalidConfig, "unsupported workload schema_version");
    WorkloadScript script;
    for (const auto& a : j.at("actions")) {
      ScriptAction action;
      action.time = a.at("time").get<Micros>();
      action.client = a.at("client").get<std::string>();
      action.broker = parse_broker_id(a.at("broker").get<std::string>());
      const std::string kind = a.at("action").get<std::string>();
      const json payload = a.value("payload", json::object());
      const ClientId client{action.client};
      if (kind == "advertise") {
        action.message = Message::advertise({predicates_from_json(payload.at("predicates")), client});
      } else if (kind == "unadvertise") {
        action.message = Message::unadvertise(client);
      } else if (kind == "subscribe") {
        const std::string id = payload.value("id", action.client + ".0");
        action.message = Message::subscribe({SubscriptionId{id}, predicates_from_json(payload.at("predicates")), client});
      } else if (kind == "unsubscribe") {
        action.message = Message::unsubscribe(SubscriptionId{payload.value("id", action.client + ".0")}, client);
      } else if (kind == "publish") {
        Publication pub;
        pub.publisher = client;
        pub.seqno = payload.value("seqno", std::uint64_t{0});
        for (const auto& [name, v] : payload.at("attrs").items()) pub.attrs[name] = value_from(v);
        action.message = Message::publish(std::move(pub));
      } else {
        throw Error(ErrorCode::ParseError, "unknown action '" + kind + "'");
      }
      script.actions.push_back(std::move(action));
    }
    if (j.contains("markers")) script.markers = j.at("markers").get<std::map<std::string, Micros>>();
    script.range_fraction = j.value("range_fraction", 1.0);
    sort_actions(script);
    return script;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("workload script: ") + e.what());
  }
}

}  // namespace scot
