#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scot/report.hpp"

namespace scot {

struct MetricsOptions {
  /// Deliveries per block of the block-maxima series.
  std::size_t block_size = 5000;
  /// Stabilization threshold as a multiple of the pre-burst maximum delay.
  double threshold_factor = 2.0;
};

struct MetricsReport {
  RunShape shape;
  std::string mode;

  /// Largest time for an advertisement to reach all brokers it reached.
  Micros adv_delay_us = 0;
  /// Largest time for a subscription to reach all brokers it reached.
  Micros sub_delay_us = 0;
  std::vector<Micros> pub_delays_us;  // per delivery, in delivery order
  double pub_delay_mean_us = 0;
  Micros pub_delay_max_us = 0;
  std::map<BrokerId, Micros> matching_delay_us;
  Micros matching_delay_total_us = 0;
  std::map<std::string, std::uint64_t> im_counts;
  std::uint64_t im_total = 0;
  /// Inter-broker messages reconstructed from per-link queue totals.
  std::uint64_t im_from_links = 0;
  std::map<BrokerId, std::size_t> clt_sizes;
  std::map<BrokerId, std::size_t> prt_sizes;
  std::size_t clt_total = 0;
  std::size_t prt_total = 0;
  std::uint64_t routing_decisions = 0;
  Micros path_selection_delay_us = 0;
  std::size_t deliveries = 0;
  std::uint64_t duplicate_handling = 0;
  std::size_t errors = 0;

  std::size_t block_size = 0;
  std::vector<Micros> block_maxima;
  std::optional<Micros> stabilization_time_us;
  std::optional<double> mean_target_q_len;
};

/// Maximum of each consecutive block of `block` values (last block may be short).
std::vector<Micros> block_maxima(const std::vector<Micros>& values, std::size_t block);

/// Throws EmptyReport for a run that processed no events.
MetricsReport compute(const RunReport& report, const MetricsOptions& options = {});

struct ComparisonRow {
  std::string metric;
  double a = 0;
  double b = 0;
  double delta = 0;                // b - a
  std::optional<double> ratio;     // b / a, absent when a == 0
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<Micros> block_maxima_a;
  std::vector<Micros> block_maxima_b;

  const ComparisonRow* find(const std::string& metric) const;
};

/// Throws ShapeMismatch when the reports describe different scenario shapes.
ComparisonTable compare(const MetricsReport& a, const MetricsReport& b);

/// Scalar metrics in their fixed export order; absent optional values are omitted.
std::vector<std::pair<std::string, double>> scalar_metrics(const MetricsReport& m);

/// Columns: scenario,metric,value.
std::string metrics_csv(const MetricsReport& m, const std::string& scenario);
/// Columns: metric,a,b,delta,ratio.
std::string comparison_csv(const ComparisonTable& table);

nlohmann::json to_json_value(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);
nlohmann::json to_json_value(const ComparisonTable& table);

}  // namespace scot
