#include "scot/report.hpp"

namespace scot {

using nlohmann::json;

std::string link_name(const BrokerId& from, const BrokerId& to) { return to_string(from) + "->" + to_string(to); }

namespace {

json control_json(const std::map<std::string, ControlRecord>& records) {
  json out = json::object();
  for (const auto& [key, rec] : records) {
    json reached = json::object();
    for (const auto& [b, t] : rec.reached) reached[to_string(b)] = t;
    out[key] = {{"issued_at", rec.issued_at}, {"reached", reached}};
  }
  return out;
}

}  // namespace

json to_json_value(const RunReport& r) {
  json j;
  j["shape"] = {{"brokers", r.shape.brokers},
                {"clusters", r.shape.clusters},
                {"regions", r.shape.regions},
                {"advertisements", r.shape.advertisements},
                {"subscriptions", r.shape.subscriptions},
                {"publications", r.shape.publications}};
  j["mode"] = std::string(to_string(r.mode));
  j["seed"] = r.seed;
  j["window_us"] = r.window_us;
  j["tau"] = r.tau;
  j["path_selection_us"] = r.path_selection_us;
  j["end_time"] = r.end_time;
  j["quiescent"] = r.quiescent;
  j["events"] = r.events;
  j["im_counts"] = r.im_counts;
  j["duplicate_handling"] = r.duplicate_handling;

  json pubs = json::object();
  for (const auto& [key, p] : r.publications) {
    pubs[key] = {{"published_at", p.published_at}, {"host", to_string(p.host)}};
  }
  j["publications"] = pubs;

  json deliveries = json::array();
  for (const auto& d : r.deliveries) {
    deliveries.push_back({{"subscriber", d.subscriber},
                          {"pub", d.pub},
                          {"broker", to_string(d.broker)},
                          {"published_at", d.published_at},
                          {"delivered_at", d.delivered_at},
                          {"hops", d.hops},
                          {"publisher_cluster", d.publisher_cluster}});
  }
  j["deliveries"] = deliveries;

  json hops = json::array();
  for (const auto& h : r.hops) {
    hops.push_back({{"time", h.time},
                    {"kind", std::string(to_string(h.kind))},
                    {"key", h.key},
                    {"from", to_string(h.from)},
                    {"to", to_string(h.to)},
                    {"civ", h.civ}});
  }
  j["hops"] = hops;
  j["advertisements"] = control_json(r.advertisements);
  j["subscriptions"] = control_json(r.subscriptions);

  json links = json::array();
  for (const auto& l : r.links) {
    links.push_back({{"from", to_string(l.from)},
                     {"to", to_string(l.to)},
                     {"type", std::string(to_string(l.type))},
                     {"enqueued", l.enqueued},
                     {"dequeued", l.dequeued},
                     {"background", l.background},
                     {"max_q_len", l.max_q_len},
                     {"final_q_len", l.final_q_len}});
  }
  j["links"] = links;

  json brokers = json::object();
  for (const auto& [id, b] : r.brokers) {
    brokers[to_string(id)] = {{"clt_entries", b.clt_entries},
                              {"prt_entries", b.prt_entries},
                              {"matching_cost", b.matching_cost},
                              {"publications", b.routing.publications},
                              {"decisions", b.routing.decisions},
                              {"case_i", b.routing.case_i},
                              {"case_ii", b.routing.case_ii},
                              {"case_iii", b.routing.case_iii}};
  }
  j["brokers"] = brokers;

  json insertions = json::object();
  for (const auto& [id, windows] : r.pub_insertions) {
    json w = json::object();
    for (const auto& [index, count] : windows) w[std::to_string(index)] = count;
    insertions[to_string(id)] = w;
  }
  j["pub_insertions"] = insertions;
  j["link_series"] = r.link_series;
  j["series_times"] = r.series_times;
  j["markers"] = r.markers;

  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back({{"time", e.time}, {"broker", to_string(e.broker)}, {"what", e.what}});
  j["errors"] = errors;
  return j;
}

std::string to_json(const RunReport& report) { return to_json_value(report).dump(2) + "\n"; }

}  // namespace scot
