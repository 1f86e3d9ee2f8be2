#pragma once

#include <string>
#include <vector>

#include "scot/topology.hpp"

namespace scot::testing {

inline std::string scenario_path(const std::string& name) { return std::string(SCOT_SCENARIO_DIR) + "/" + name; }

inline Graph path_graph(const std::vector<std::string>& labels) {
  Graph g;
  for (const auto& l : labels) g.add_vertex(l);
  for (std::size_t i = 1; i < labels.size(); ++i) g.add_edge(labels[i - 1], labels[i]);
  return g;
}

inline Graph complete_graph(int n) {
  Graph g;
  for (int i = 0; i < n; ++i) g.add_vertex(std::to_string(i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.add_edge(std::to_string(i), std::to_string(j));
  }
  return g;
}

/// a - b - c, d - e, e - f hanging off b and d: the six-region example tree.
inline Graph six_region_af() {
  Graph g;
  g.add_edge("a", "b");
  g.add_edge("b", "c");
  g.add_edge("b", "d");
  g.add_edge("d", "e");
  g.add_edge("e", "f");
  return g;
}

inline BrokerId B(const std::string& region, int cluster) { return BrokerId{region, cluster}; }

}  // namespace scot::testing
