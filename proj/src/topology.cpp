#include "scot/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace scot {

namespace {

bool label_is_valid(std::string_view label) {
  if (label.empty()) return false;
  return std::none_of(label.begin(), label.end(), [](char c) {
    return c == ',' || c == '(' || c == ')' || c == '#' ||
           static_cast<unsigned char>(c) <= ' ';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(const BrokerId& id) {
  return "B(" + id.region + "," + std::to_string(id.cluster) + ")";
}

BrokerId parse_broker_id(std::string_view text) {
  text = trim(text);
  if (text.size() > 3 && text.substr(0, 2) == "B(" && text.back() == ')') {
    text = text.substr(2, text.size() - 3);
  }
  const auto comma = text.rfind(',');
  if (comma == std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "broker id needs 'region,cluster': " + std::string(text));
  }
  const auto region = trim(text.substr(0, comma));
  const auto cluster = parse_cluster_label(trim(text.substr(comma + 1)));
  if (region.empty() || !cluster) {
    throw Error(ErrorCode::ParseError, "malformed broker id: " + std::string(text));
  }
  return BrokerId{std::string(region), *cluster};
}

std::string_view to_string(LinkType type) { return type == LinkType::ALink ? "aLink" : "iLink"; }

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyFactor: return "EmptyFactor";
    case ViolationKind::AcyclicViolation: return "AcyclicViolation";
    case ViolationKind::DisconnectedAcyclicFactor: return "DisconnectedAcyclicFactor";
    case ViolationKind::ConnectivityViolation: return "ConnectivityViolation";
    case ViolationKind::IndexViolation: return "IndexViolation";
    case ViolationKind::LabelViolation: return "LabelViolation";
  }
  return "Unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "valid";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.kind)) + " (" + v.detail + ")";
  }
  return out;
}

std::optional<int> parse_cluster_label(std::string_view label) {
  if (label.empty() || label.size() > 9) return std::nullopt;
  if (label.size() > 1 && label.front() == '0') return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (ec != std::errc{} || ptr != label.data() + label.size() || value < 0) return std::nullopt;
  return value;
}

ValidationReport validate_scot_factors(const Graph& af, const Graph& cf) {
  ValidationReport report;
  auto add = [&report](ViolationKind kind, std::string detail) {
    report.violations.push_back({kind, std::move(detail)});
  };

  if (af.empty()) add(ViolationKind::EmptyFactor, "acyclic factor has no vertices");
  if (cf.empty()) add(ViolationKind::EmptyFactor, "connectivity factor has no vertices");

  for (const auto& v : af.vertices()) {
    if (!label_is_valid(v)) add(ViolationKind::LabelViolation, "acyclic label '" + v + "'");
  }
  if (!af.empty()) {
    if (!af.acyclic()) add(ViolationKind::AcyclicViolation, "acyclic factor contains a cycle");
    if (!af.connected()) add(ViolationKind::DisconnectedAcyclicFactor, "acyclic factor is not connected");
  }

  if (!cf.empty()) {
    if (!cf.complete()) add(ViolationKind::ConnectivityViolation, "connectivity factor is not complete");
    std::set<int> indexes;
    for (const auto& v : cf.vertices()) {
      const auto idx = parse_cluster_label(v);
      if (!idx) {
        add(ViolationKind::IndexViolation, "label '" + v + "' is not a cluster index");
      } else {
        indexes.insert(*idx);
      }
    }
    if (indexes.size() == cf.order() && !indexes.empty() &&
        (*indexes.begin() != 0 || *indexes.rbegin() != static_cast<int>(cf.order()) - 1)) {
      add(ViolationKind::IndexViolation, "cluster labels must be exactly 0.." + std::to_string(cf.order() - 1));
    }
  }
  return report;
}

Scot Scot::build(const Graph& af, const Graph& cf) {
  auto report = validate_scot_factors(af, cf);
  if (!report.valid()) throw InvalidFactors(std::move(report));

  Scot scot;
  scot.af_ = af;
  scot.cf_ = cf;
  scot.cluster_count_ = static_cast<int>(cf.order());
  scot.af_diameter_ = graph_diameter(af);

  BasicGraph<int> clusters;
  for (const auto& v : cf.vertices()) clusters.add_vertex(*parse_cluster_label(v));
  for (const auto& [a, b] : cf.edges()) clusters.add_edge(*parse_cluster_label(a), *parse_cluster_label(b));

  const auto pairs = cartesian_product(af, clusters);
  for (const auto& [x, y] : pairs.vertices()) scot.product_.add_vertex(BrokerId{x, y});
  for (const auto& [p, q] : pairs.edges()) {
    scot.product_.add_edge(BrokerId{p.first, p.second}, BrokerId{q.first, q.second});
  }
  return scot;
}

void Scot::require(const BrokerId& b) const {
  if (!contains(b)) throw Error(ErrorCode::UnknownBroker, to_string(b));
}

std::vector<BrokerId> Scot::cluster(int index) const {
  std::vector<BrokerId> out;
  if (index < 0 || index >= cluster_count_) return out;
  for (const auto& x : af_.vertices()) out.push_back({x, index});
  return out;
}

std::vector<BrokerId> Scot::region(const Label& label) const {
  std::vector<BrokerId> out;
  if (!af_.has_vertex(label)) return out;
  for (int y = 0; y < cluster_count_; ++y) out.push_back({label, y});
  return out;
}

LinkType Scot::link_type(const BrokerId& a, const BrokerId& b) const {
  if (!has_link(a, b)) {
    throw Error(ErrorCode::UnknownLink, to_string(a) + "-" + to_string(b));
  }
  return a.cluster == b.cluster ? LinkType::ALink : LinkType::ILink;
}

Neighbours Scot::neighbours(const BrokerId& b) const {
  require(b);
  Neighbours n;
  for (const auto& other : product_.adjacent(b)) {
    (other.cluster == b.cluster ? n.primary : n.secondary).insert(other);
  }
  return n;
}

bool Scot::is_edge_broker(const BrokerId& b) const {
  require(b);
  return af_.adjacent(b.region).size() <= 1;
}

BrokerId Scot::region_peer(const BrokerId& b, int index) const {
  require(b);
  if (index < 0 || index >= cluster_count_) {
    throw Error(ErrorCode::IndexOutOfRange, "cluster " + std::to_string(index));
  }
  return BrokerId{b.region, index};
}

FactorFile parse_factor(std::string_view text) {
  std::optional<FactorRole> role;
  Graph graph;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + why);
    };

    if (line.substr(0, 7) == "factor:") {
      if (role) fail("duplicate factor header");
      const auto value = trim(line.substr(7));
      if (value == "af") {
        role = FactorRole::Acyclic;
      } else if (value == "cf") {
        role = FactorRole::Connectivity;
      } else {
        fail("factor must be 'af' or 'cf'");
      }
      continue;
    }
    if (!role) fail("missing 'factor:' header");

    std::istringstream words{std::string(line)};
    std::string keyword, a, b, extra;
    words >> keyword >> a >> b >> extra;
    if (!extra.empty()) fail("trailing tokens");
    if (keyword == "vertex" && !a.empty() && b.empty()) {
      if (!label_is_valid(a)) fail("invalid label '" + a + "'");
      graph.add_vertex(a);
    } else if (keyword == "edge" && !a.empty() && !b.empty()) {
      if (!label_is_valid(a) || !label_is_valid(b)) fail("invalid label");
      if (a == b) fail("self-loop on '" + a + "'");
      graph.add_edge(a, b);
    } else {
      fail("expected 'vertex <label>' or 'edge <label> <label>'");
    }
  }
  if (!role) throw Error(ErrorCode::ParseError, "missing 'factor:' header");
  return FactorFile{*role, std::move(graph)};
}

FactorFile load_factor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_factor(buffer.str());
}

std::string format_factor(const FactorFile& factor) {
  std::string out = factor.role == FactorRole::Acyclic ? "factor: af\n" : "factor: cf\n";
  std::set<Label> covered;
  for (const auto& [a, b] : factor.graph.edges()) {
    covered.insert(a);
    covered.insert(b);
  }
  for (const auto& v : factor.graph.vertices()) {
    if (!covered.count(v)) out += "vertex " + v + "\n";
  }
  for (const auto& [a, b] : factor.graph.edges()) out += "edge " + a + " " + b + "\n";
  return out;
}

}  // namespace scot
