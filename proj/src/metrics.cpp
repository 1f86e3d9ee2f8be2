#include "scot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scot {

using nlohmann::json;

std::vector<Micros> block_maxima(const std::vector<Micros>& values, std::size_t block) {
  if (block == 0) throw Error(ErrorCode::InvalidConfig, "block size must be positive");
  std::vector<Micros> out;
  for (std::size_t i = 0; i < values.size(); i += block) {
    const auto end = values.begin() + static_cast<std::ptrdiff_t>(std::min(values.size(), i + block));
    out.push_back(*std::max_element(values.begin() + static_cast<std::ptrdiff_t>(i), end));
  }
  return out;
}

namespace {

Micros control_delay(const std::map<std::string, ControlRecord>& records) {
  Micros worst = 0;
  for (const auto& [key, rec] : records) {
    for (const auto& [b, t] : rec.reached) worst = std::max(worst, t - rec.issued_at);
  }
  return worst;
}

/// Time after burst end from which no delivery exceeds the threshold.
std::optional<Micros> stabilization(const RunReport& r, const MetricsOptions& options) {
  auto start = r.markers.find("burst_start");
  auto end = r.markers.find("burst_end");
  if (start == r.markers.end() || end == r.markers.end()) return std::nullopt;
  Micros pre_max = -1;
  for (const auto& d : r.deliveries) {
    if (d.delivered_at < start->second) pre_max = std::max(pre_max, d.delivered_at - d.published_at);
  }
  if (pre_max < 0) return std::nullopt;
  const double threshold = options.threshold_factor * static_cast<double>(std::max<Micros>(pre_max, 1));
  Micros last_bad = end->second;
  for (const auto& d : r.deliveries) {
    if (static_cast<double>(d.delivered_at - d.published_at) >= threshold) last_bad = std::max(last_bad, d.delivered_at);
  }
  return last_bad - end->second;
}

std::optional<double> mean_target_queue(const RunReport& r) {
  if (r.link_series.empty() || r.series_times.empty()) return std::nullopt;
  auto start = r.markers.find("burst_start");
  const Micros from = start == r.markers.end() ? 0 : start->second;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [name, series] : r.link_series) {
    for (std::size_t i = 0; i < series.size() && i < r.series_times.size(); ++i) {
      if (r.series_times[i] < from) continue;
      sum += static_cast<double>(series[i]);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

MetricsReport compute(const RunReport& r, const MetricsOptions& options) {
  if (r.events == 0) throw Error(ErrorCode::EmptyReport, "run report holds no events");
  MetricsReport m;
  m.shape = r.shape;
  m.mode = std::string(to_string(r.mode));
  m.adv_delay_us = control_delay(r.advertisements);
  m.sub_delay_us = control_delay(r.subscriptions);

  double sum = 0;
  for (const auto& d : r.deliveries) {
    const Micros delay = d.delivered_at - d.published_at;
    m.pub_delays_us.push_back(delay);
    m.pub_delay_max_us = std::max(m.pub_delay_max_us, delay);
    sum += static_cast<double>(delay);
  }
  m.deliveries = r.deliveries.size();
  if (m.deliveries > 0) m.pub_delay_mean_us = sum / static_cast<double>(m.deliveries);

  for (const auto& [id, b] : r.brokers) {
    m.matching_delay_us[id] = b.matching_cost;
    m.matching_delay_total_us += b.matching_cost;
    m.clt_sizes[id] = b.clt_entries;
    m.prt_sizes[id] = b.prt_entries;
    m.clt_total += b.clt_entries;
    m.prt_total += b.prt_entries;
    m.routing_decisions += b.routing.decisions;
  }
  m.path_selection_delay_us = static_cast<Micros>(m.routing_decisions) * r.path_selection_us;

  m.im_counts = r.im_counts;
  for (const auto& [phase, n] : r.im_counts) m.im_total += n;
  for (const auto& l : r.links) m.im_from_links += l.enqueued - l.background;

  m.duplicate_handling = r.duplicate_handling;
  m.errors = r.errors.size();
  m.block_size = options.block_size;
  m.block_maxima = block_maxima(m.pub_delays_us, options.block_size);
  m.stabilization_time_us = stabilization(r, options);
  m.mean_target_q_len = mean_target_queue(r);
  return m;
}

std::vector<std::pair<std::string, double>> scalar_metrics(const MetricsReport& m) {
  std::vector<std::pair<std::string, double>> out;
  auto add = [&](const char* name, double v) { out.emplace_back(name, v); };
  add("adv_delay_us", static_cast<double>(m.adv_delay_us));
  add("sub_delay_us", static_cast<double>(m.sub_delay_us));
  add("pub_delay_mean_us", m.pub_delay_mean_us);
  add("pub_delay_max_us", static_cast<double>(m.pub_delay_max_us));
  add("matching_delay_us", static_cast<double>(m.matching_delay_total_us));
  for (const char* phase : {"abp", "sbp", "civ", "routing"}) {
    auto it = m.im_counts.find(phase);
    out.emplace_back(std::string("im_") + phase, it == m.im_counts.end() ? 0.0 : static_cast<double>(it->second));
  }
  add("im_total", static_cast<double>(m.im_total));
  add("clt_total", static_cast<double>(m.clt_total));
  add("prt_total", static_cast<double>(m.prt_total));
  add("routing_decisions", static_cast<double>(m.routing_decisions));
  add("path_selection_delay_us", static_cast<double>(m.path_selection_delay_us));
  add("deliveries", static_cast<double>(m.deliveries));
  add("duplicate_handling", static_cast<double>(m.duplicate_handling));
  add("errors", static_cast<double>(m.errors));
  if (m.stabilization_time_us) add("stabilization_time_us", static_cast<double>(*m.stabilization_time_us));
  if (m.mean_target_q_len) add("mean_target_q_len", *m.mean_target_q_len);
  return out;
}

const ComparisonRow* ComparisonTable::find(const std::string& metric) const {
  for (const auto& row : rows) {
    if (row.metric == metric) return &row;
  }
  return nullptr;
}

ComparisonTable compare(const MetricsReport& a, const MetricsReport& b) {
  if (!(a.shape == b.shape)) throw Error(ErrorCode::ShapeMismatch, "reports describe different scenario shapes");
  ComparisonTable table;
  const auto sa = scalar_metrics(a);
  const auto sb = scalar_metrics(b);
  for (const auto& [name, va] : sa) {
    auto it = std::find_if(sb.begin(), sb.end(), [&](const auto& kv) { return kv.first == name; });
    if (it == sb.end()) continue;
    ComparisonRow row{name, va, it->second, it->second - va, std::nullopt};
    if (va != 0) row.ratio = it->second / va;
    table.rows.push_back(row);
  }
  table.block_maxima_a = a.block_maxima;
  table.block_maxima_b = b.block_maxima;
  return table;
}

namespace {

std::string number(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::string metrics_csv(const MetricsReport& m, const std::string& scenario) {
  std::string out = "scenario,metric,value\n";
  for (const auto& [name, v] : scalar_metrics(m)) out += scenario + "," + name + "," + number(v) + "\n";
  return out;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "metric,a,b,delta,ratio\n";
  for (const auto& row : table.rows) {
    out += row.metric + "," + number(row.a) + "," + number(row.b) + "," + number(row.delta) + "," +
           (row.ratio ? number(*row.ratio) : "") + "\n";
  }
  return out;
}

json to_json_value(const MetricsReport& m) {
  json j;
  j["shape"] = {{"brokers", m.shape.brokers},
                {"clusters", m.shape.clusters},
                {"regions", m.shape.regions},
                {"advertisements", m.shape.advertisements},
                {"subscriptions", m.shape.subscriptions},
                {"publications", m.shape.publications}};
  j["mode"] = m.mode;
  json scalars = json::object();
  for (const auto& [name, v] : scalar_metrics(m)) scalars[name] = v;
  j["scalars"] = scalars;
  j["im_counts"] = m.im_counts;
  j["im_from_links"] = m.im_from_links;
  json clt = json::object();
  json prt = json::object();
  json matching = json::object();
  for (const auto& [id, n] : m.clt_sizes) clt[to_string(id)] = n;
  for (const auto& [id, n] : m.prt_sizes) prt[to_string(id)] = n;
  for (const auto& [id, n] : m.matching_delay_us) matching[to_string(id)] = n;
  j["clt_sizes"] = clt;
  j["prt_sizes"] = prt;
  j["matching_delay_us"] = matching;
  j["block_size"] = m.block_size;
  j["block_maxima"] = m.block_maxima;
  return j;
}

MetricsReport metrics_from_json(const json& j) {
  try {
    MetricsReport m;
    const json& shape = j.at("shape");
    m.shape.brokers = shape.at("brokers").get<std::size_t>();
    m.shape.clusters = shape.at("clusters").get<int>();
    m.shape.regions = shape.at("regions").get<std::size_t>();
    m.shape.advertisements = shape.at("advertisements").get<std::size_t>();
    m.shape.subscriptions = shape.at("subscriptions").get<std::size_t>();
    m.shape.publications = shape.at("publications").get<std::size_t>();
    m.mode = j.at("mode").get<std::string>();
    const json& s = j.at("scalars");
    auto micros = [&](const char* name) { return static_cast<Micros>(std::llround(s.at(name).get<double>())); };
    m.adv_delay_us = micros("adv_delay_us");
    m.sub_delay_us = micros("sub_delay_us");
    m.pub_delay_mean_us = s.at("pub_delay_mean_us").get<double>();
    m.pub_delay_max_us = micros("pub_delay_max_us");
    m.matching_delay_total_us = micros("matching_delay_us");
    m.im_counts = j.at("im_counts").get<std::map<std::string, std::uint64_t>>();
    m.im_total = static_cast<std::uint64_t>(micros("im_total"));
    m.im_from_links = j.at("im_from_links").get<std::uint64_t>();
    m.clt_total = static_cast<std::size_t>(micros("clt_total"));
    m.prt_total = static_cast<std::size_t>(micros("prt_total"));
    m.routing_decisions = static_cast<std::uint64_t>(micros("routing_decisions"));
    m.path_selection_delay_us = micros("path_selection_delay_us");
    m.deliveries = static_cast<std::size_t>(micros("deliveries"));
    m.duplicate_handling = static_cast<std::uint64_t>(micros("duplicate_handling"));
    m.errors = static_cast<std::size_t>(micros("errors"));
    if (s.contains("stabilization_time_us")) m.stabilization_time_us = micros("stabilization_time_us");
    if (s.contains("mean_target_q_len")) m.mean_target_q_len = s.at("mean_target_q_len").get<double>();
    for (const auto& [k, v] : j.at("clt_sizes").items()) m.clt_sizes[parse_broker_id(k)] = v.get<std::size_t>();
    for (const auto& [k, v] : j.at("prt_sizes").items()) m.prt_sizes[parse_broker_id(k)] = v.get<std::size_t>();
    for (const auto& [k, v] : j.at("matching_delay_us").items()) m.matching_delay_us[parse_broker_id(k)] = v.get<Micros>();
    m.block_size = j.at("block_size").get<std::size_t>();
    m.block_maxima = j.at("block_maxima").get<std::vector<Micros>>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("metrics report: ") + e.what());
  }
}

json to_json_value(const ComparisonTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = {{"metric", row.metric}, {"a", row.a}, {"b", row.b}, {"delta", row.delta}};
    r["ratio"] = row.ratio ? json(*row.ratio) : json(nullptr);
    rows.push_back(r);
  }
  return {{"rows", rows}, {"block_maxima_a", table.block_maxima_a}, {"block_maxima_b", table.block_maxima_b}};
}

}  // namespace scot
