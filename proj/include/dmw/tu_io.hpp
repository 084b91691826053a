#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmw/spaces.hpp"

namespace dmw {

struct TuGraph {
  FiniteMetricMeasureSpace space;
  long label = 0;
};

struct TuDataset {
  std::string name;
  std::vector<TuGraph> graphs;
  std::vector<std::string> warnings;  // e.g. disconnected graphs reduced to largest component
};

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tu: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline long parse_long(const std::string& text, const std::string& path, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("tu: " + path + ":" + std::to_string(lineno) +
                             ": cannot parse integer '" + text + "'");
  }
}

}  // namespace detail

// Loads the standard TU layout: DS_A.txt (comma-separated 1-based edge
// list), DS_graph_indicator.txt (node -> graph id), DS_graph_labels.txt.
// Disconnected graphs are reduced to their largest connected component with
// a warning; an optional node budget truncates each graph.
inline TuDataset load_tu_dataset(const std::string& directory, const std::string& name,
                                 std::optional<std::size_t> node_budget = std::nullopt,
                                 RngSeed truncation_seed = RngSeed{0}) {
  const std::string base = directory + "/" + name + "/" + name;
  const std::string a_path = base + "_A.txt";
  const std::string ind_path = base + "_graph_indicator.txt";
  const std::string lab_path = base + "_graph_labels.txt";

  const auto indicator_lines = detail::read_lines(ind_path);
  const auto label_lines = detail::read_lines(lab_path);
  const auto edge_lines = detail::read_lines(a_path);

  std::vector<long> node_graph;  // graph id (1-based) per node
  for (std::size_t k = 0; k < indicator_lines.size(); ++k) {
    if (indicator_lines[k].empty()) continue;
    node_graph.push_back(detail::parse_long(indicator_lines[k], ind_path, k + 1));
  }
  if (node_graph.empty()) throw std::runtime_error("tu: " + ind_path + ": empty indicator file");

  long graph_count = 0;
  for (long g : node_graph) {
    if (g <= 0) throw std::runtime_error("tu: " + ind_path + ": graph ids must be positive");
    graph_count = std::max(graph_count, g);
  }

  std::vector<long> labels;
  for (std::size_t k = 0; k < label_lines.size(); ++k) {
    if (label_lines[k].empty()) continue;
    labels.push_back(detail::parse_long(label_lines[k], lab_path, k + 1));
  }
  if (static_cast<long>(labels.size()) != graph_count) {
    throw std::runtime_error("tu: " + lab_path + ": label count " +
                             std::to_string(labels.size()) + " does not match graph count " +
                             std::to_string(graph_count));
  }

  // Local node index within each graph.
  std::vector<std::size_t> local_index(node_graph.size());
  std::vector<std::size_t> graph_size(graph_count, 0);
  for (std::size_t v = 0; v < node_graph.size(); ++v) {
    const std::size_t g = static_cast<std::size_t>(node_graph[v] - 1);
    local_index[v] = graph_size[g]++;
  }
  for (long g = 0; g < graph_count; ++g) {
    if (graph_size[g] == 0) {
      throw std::runtime_error("tu: graph " + std::to_string(g + 1) + " has no nodes");
    }
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges(graph_count);
  for (std::size_t k = 0; k < edge_lines.size(); ++k) {
    const std::string& line = edge_lines[k];
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("tu: " + a_path + ":" + std::to_string(k + 1) +
                               ": expected 'u, v'");
    }
    const long u = detail::parse_long(line.substr(0, comma), a_path, k + 1);
    const long v = detail::parse_long(line.substr(comma + 1), a_path, k + 1);
    if (u < 1 || v < 1 || u > static_cast<long>(node_graph.size()) ||
        v > static_cast<long>(node_graph.size())) {
      throw std::runtime_error("tu: " + a_path + ":" + std::to_string(k + 1) +
                               ": node index out of range");
    }
    if (node_graph[u - 1] != node_graph[v - 1]) {
      throw std::runtime_error("tu: " + a_path + ":" + std::to_string(k + 1) +
                               ": edge crosses graphs");
    }
    if (u == v) continue;  // TU files occasionally carry self-loops; drop them
    const std::size_t g = static_cast<std::size_t>(node_graph[u - 1] - 1);
    const std::size_t lu = local_index[u - 1];
    const std::size_t lv = local_index[v - 1];
    if (lu < lv) edges[g].emplace_back(lu, lv);  // files list both directions; keep one
  }

  TuDataset dataset;
  dataset.name = name;
  for (long g = 0; g < graph_count; ++g) {
    GraphSpec spec;
    spec.node_count = graph_size[g];
    spec.edges = edges[g];
    spec.node_budget = node_budget;
    spec.truncation_seed = child_seed(truncation_seed, static_cast<std::uint64_t>(g));
    FiniteMetricMeasureSpace space = [&]() {
      try {
        return space_from_graph(spec);
      } catch (const std::invalid_argument&) {
        // Disconnected: keep the largest connected component.
        auto adj = detail::adjacency_list(spec.node_count, spec.edges);
        const auto kept = detail::largest_component(adj);
        if (kept.size() < 1) {
          throw std::runtime_error("tu: graph " + std::to_string(g + 1) + " is empty");
        }
        dataset.warnings.push_back("graph " + std::to_string(g + 1) +
                                   " disconnected; using largest component of size " +
                                   std::to_string(kept.size()));
        std::vector<std::size_t> relabel(spec.node_count, static_cast<std::size_t>(-1));
        for (std::size_t i = 0; i < kept.size(); ++i) relabel[kept[i]] = i;
        GraphSpec sub;
        sub.node_count = kept.size();
        sub.node_budget = node_budget;
        sub.truncation_seed = spec.truncation_seed;
        for (const auto& [u, v] : spec.edges) {
          if (relabel[u] != static_cast<std::size_t>(-1) &&
              relabel[v] != static_cast<std::size_t>(-1)) {
            sub.edges.emplace_back(relabel[u], relabel[v]);
          }
        }
        return space_from_graph(sub);
      }
    }();
    dataset.graphs.push_back(TuGraph{std::move(space), labels[g]});
  }
  return dataset;
}

}  // namespace dmw
