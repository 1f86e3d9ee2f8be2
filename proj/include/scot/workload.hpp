#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scot/message.hpp"
#include "scot/report.hpp"
#include "scot/topology.hpp"

namespace scot {

class SimNet;

/// Seeded mt19937_64 with hand-written bounded draws, so streams are identical
/// on every standard library (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform double in [0, 1).
  double unit();
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

/// How publishers describe their content space.
enum class AdvertisementStyle {
  /// Symbol plus the whole numeric domain; publications are drawn uniformly.
  Domain,
  /// One fixed publication point per publisher, advertised with equalities.
  Point,
};

std::string_view to_string(AdvertisementStyle style);
AdvertisementStyle parse_advertisement_style(std::string_view text);

/// One publication basis row per entry: attribute name -> value.
using BasisRow = std::map<std::string, Value>;

struct WorkloadConfig {
  std::size_t n_publishers = 10;
  std::size_t n_subscribers = 100;
  std::size_t n_symbols = 50;
  /// One string attribute ("symbol") plus n_attributes - 1 numeric ones.
  std::size_t n_attributes = 7;
  double selectivity = 0.02;
  /// Publications per sim-minute per publisher.
  double pub_rate = 60.0;
  std::size_t pubs_per_publisher = 10;
  AdvertisementStyle adv_style = AdvertisementStyle::Domain;
  Micros control_start_us = 0;
  Micros control_spacing_us = 1000;
  Micros pub_start_us = 1'000'000;
  std::uint64_t seed = 1;
  /// Relative tolerance on the calibrated selectivity.
  double tolerance = 0.25;
  std::size_t calibration_samples = 600;
  /// Optional real data; when set, publications are drawn from these rows.
  std::vector<BasisRow> basis;

  void validate() const;
};

struct BurstConfig {
  std::size_t hrp_total = 5000;
  /// Publications per sim-minute, one script per rate.
  std::vector<double> hrp_rates{100000.0};
  /// Matching HRP subscribers as a fraction of the base subscribers.
  double matching_fraction = 0.001;
  Micros control_at_us = 0;
  Micros start_us = 2'000'000;
  std::optional<BrokerId> hrp_host;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ScriptAction {
  Micros time = 0;
  std::string client;
  BrokerId broker;
  Message message;
};

struct WorkloadScript {
  std::vector<ScriptAction> actions;
  std::map<std::string, Micros> markers;
  /// Width fraction the generator settled on (informational).
  double range_fraction = 1.0;
};

/// Attribute schema: name -> numeric domain; symbol is the string attribute.
struct AttributeSchema {
  std::vector<std::string> numeric;
  std::map<std::string, std::pair<double, double>> domain;
  std::vector<std::string> symbols;
};

WorkloadScript generate(const WorkloadConfig& cfg, const Scot& scot);
std::vector<WorkloadScript> generate_burst(const BurstConfig& cfg, const WorkloadScript& base, const Scot& scot);

/// Parses a CSV with a header of 7 column names; the first column holds the
/// symbol, the others numbers. Throws ParseError.
std::vector<BasisRow> parse_basis_csv(std::string_view text);

/// Fraction of (publication, subscription) pairs in the script that match.
double measured_selectivity(const WorkloadScript& script);

/// Centralized matcher: (subscriber, "publisher:seqno") for every publication
/// and every subscription active in the script.
std::set<std::pair<std::string, std::string>> expected_deliveries(const WorkloadScript& script);

/// Attaches every client and schedules every action and marker.
void load_into(const WorkloadScript& script, SimNet& net);

nlohmann::json to_json_value(const WorkloadScript& script);
std::string to_json(const WorkloadScript& script);
WorkloadScript workload_from_json(const nlohmann::json& j);

nlohmann::json predicates_to_json(const std::vector<Predicate>& predicates);
std::vector<Predicate> predicates_from_json(const nlohmann::json& j);

}  // namespace scot
