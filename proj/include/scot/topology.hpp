#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scot/graph.hpp"

namespace scot {

/// Broker B(x, y): x is a vertex of the acyclic factor (region), y a vertex of
/// the connectivity factor (cluster index).
struct BrokerId {
  Label region;
  int cluster = 0;

  auto operator<=>(const BrokerId&) const = default;
  bool operator==(const BrokerId&) const = default;
};

std::string to_string(const BrokerId& id);

/// Parses "B(x,y)" or "x,y".
BrokerId parse_broker_id(std::string_view text);

enum class LinkType { ALink, ILink };

std::string_view to_string(LinkType type);

enum class FactorRole { Acyclic, Connectivity };

enum class ViolationKind {
  EmptyFactor,
  AcyclicViolation,
  DisconnectedAcyclicFactor,
  ConnectivityViolation,
  IndexViolation,
  LabelViolation,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate_scot_factors(const Graph& af, const Graph& cf);

class InvalidFactors : public Error {
 public:
  explicit InvalidFactors(ValidationReport report)
      : Error(ErrorCode::InvalidFactors, report.summary()), report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct Neighbours {
  std::set<BrokerId> primary;
  std::set<BrokerId> secondary;
};

using ProductGraph = BasicGraph<BrokerId>;

/// Structured cyclic overlay: af □ cf with cluster/region indexes and link
/// classification. Immutable after build().
class Scot {
 public:
  static Scot build(const Graph& af, const Graph& cf);

  const ProductGraph& product() const { return product_; }
  const Graph& af() const { return af_; }
  const Graph& cf() const { return cf_; }

  int cluster_count() const { return cluster_count_; }
  std::size_t region_count() const { return af_.order(); }
  std::size_t broker_count() const { return product_.order(); }
  std::size_t alink_count() const { return cluster_count_ * af_.size(); }
  std::size_t ilink_count() const { return af_.order() * cf_.size(); }
  std::size_t af_diameter() const { return af_diameter_; }

  bool contains(const BrokerId& b) const { return product_.has_vertex(b); }
  std::vector<BrokerId> brokers() const { return product_.vertices(); }
  std::vector<BrokerId> cluster(int index) const;
  std::vector<BrokerId> region(const Label& label) const;
  std::vector<Label> region_labels() const { return af_.vertices(); }

  bool has_link(const BrokerId& a, const BrokerId& b) const { return product_.has_edge(a, b); }
  LinkType link_type(const BrokerId& a, const BrokerId& b) const;

  Neighbours neighbours(const BrokerId& b) const;
  bool is_edge_broker(const BrokerId& b) const;

  /// The broker of cluster `index` in b's region (the iLink peer for that cluster).
  BrokerId region_peer(const BrokerId& b, int index) const;

 private:
  Scot() = default;
  void require(const BrokerId& b) const;

  Graph af_;
  Graph cf_;
  ProductGraph product_;
  int cluster_count_ = 0;
  std::size_t af_diameter_ = 0;
};

/// One factor graph read from the text format:
///   factor: af|cf
///   vertex <label>
///   edge <label> <label>
struct FactorFile {
  FactorRole role;
  Graph graph;
};

FactorFile parse_factor(std::string_view text);
FactorFile load_factor(const std::string& path);
std::string format_factor(const FactorFile& factor);

/// Parses a cluster label; only the exact decimal spellings 0..n-1 are accepted.
std::optional<int> parse_cluster_label(std::string_view label);

}  // namespace scot
