#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmw/rng.hpp"

namespace dmw {

// Finite metric measure space: dense symmetric distance matrix plus a
// probability weight vector. Immutable after construction; construction
// verifies the metric axioms (triangle inequality exhaustively for m <= 512,
// on sampled triples above that).
class FiniteMetricMeasureSpace {
 public:
  FiniteMetricMeasureSpace(std::vector<double> distances, std::vector<double> weights)
      : size_(weights.size()), dist_(std::move(distances)), weights_(std::move(weights)) {
    validate();
    diameter_ = 0.0;
    for (double v : dist_) diameter_ = std::max(diameter_, v);
  }

  static FiniteMetricMeasureSpace uniform(std::vector<double> distances, std::size_t m) {
    return FiniteMetricMeasureSpace(std::move(distances),
                                    std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  std::size_t size() const { return size_; }
  double diameter() const { return diameter_; }
  double d(std::size_t i, std::size_t j) const { return dist_[i * size_ + j]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& distance_matrix() const { return dist_; }

 private:
  void validate() const {
    const std::size_t m = size_;
    if (m == 0 || dist_.size() != m * m) {
      throw std::invalid_argument("space: distance matrix must be m x m, m >= 1");
    }
    double wsum = 0.0;
    for (double w : weights_) {
      if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("space: negative weight");
      wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
      throw std::invalid_argument("space: weights must sum to 1");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (dist_[i * m + i] != 0.0) throw std::invalid_argument("space: nonzero diagonal");
      for (std::size_t j = i + 1; j < m; ++j) {
        const double v = dist_[i * m + j];
        if (v < 0.0 || !std::isfinite(v)) {
          throw std::invalid_argument("space: invalid distance entry");
        }
        if (v != dist_[j * m + i]) throw std::invalid_argument("space: asymmetric distances");
      }
    }
    if (m <= 512) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < m; ++k) {
            if (dist_[i * m + k] > dist_[i * m + j] + dist_[j * m + k] + 1e-12) {
              throw std::invalid_argument("space: triangle inequality violated at (" +
                                          std::to_string(i) + "," + std::to_string(j) + "," +
                                          std::to_string(k) + ")");
            }
          }
        }
      }
    } else {
      Rng rng(RngSeed{0x7451c3u});
      for (std::size_t t = 0; t < 200000; ++t) {
        const std::size_t i = rng.next_index(m);
        const std::size_t j = rng.next_index(m);
        const std::size_t k = rng.next_index(m);
        if (dist_[i * m + k] > dist_[i * m + j] + dist_[j * m + k] + 1e-12) {
          throw std::invalid_argument("space: triangle inequality violated (sampled)");
        }
      }
    }
  }

  std::size_t size_;
  std::vector<double> dist_;
  std::vector<double> weights_;
  double diameter_ = 0.0;
};

struct GraphSpec {
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected, no self-loops
  std::optional<std::size_t> node_budget;                  // uniform truncation if set
  RngSeed truncation_seed{0};
};

namespace detail {

inline std::vector<std::vector<std::size_t>> adjacency_list(
    std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(nodes);
  for (const auto& [u, v] : edges) {
    if (u >= nodes || v >= nodes) throw std::invalid_argument("graph: edge endpoint out of range");
    if (u == v) throw std::invalid_argument("graph: self-loop");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

// BFS hop counts from source; -1 for unreachable.
inline std::vector<int> bfs_hops(const std::vector<std::vector<std::size_t>>& adj,
                                 std::size_t source) {
  std::vector<int> hops(adj.size(), -1);
  std::vector<std::size_t> queue{source};
  hops[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t v : adj[u]) {
      if (hops[v] < 0) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return hops;
}

inline std::vector<std::size_t> largest_component(
    const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<int> comp(adj.size(), -1);
  std::vector<std::size_t> best;
  int label = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> members{s};
    comp[s] = label;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (std::size_t v : adj[members[head]]) {
        if (comp[v] < 0) {
          comp[v] = label;
          members.push_back(v);
        }
      }
    }
    if (members.size() > best.size()) best = std::move(members);
    ++label;
  }
  std::sort(best.begin(), best.end());
  return best;
}

inline FiniteMetricMeasureSpace space_from_connected_graph(
    std::size_t nodes, const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t m = nodes;
  std::vector<double> dist(m * m, 0.0);
  int diameter_hops = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const auto hops = bfs_hops(adj, s);
    for (std::size_t t = 0; t < m; ++t) {
      if (hops[t] < 0) {
        throw std::invalid_argument("graph: disconnected pair (" + std::to_string(s) + "," +
                                    std::to_string(t) + ")");
      }
      dist[s * m + t] = static_cast<double>(hops[t]);
      diameter_hops = std::max(diameter_hops, hops[t]);
    }
  }
  if (diameter_hops > 0) {
    const double inv = 1.0 / static_cast<double>(diameter_hops);
    for (auto& v : dist) v *= inv;
  }
  return FiniteMetricMeasureSpace::uniform(std::move(dist), m);
}

}  // namespace detail

// Graph metric space: BFS shortest-path hop counts normalized by the graph
// diameter (so diam = 1 exactly) with the uniform node measure. With a node
// budget, nodes are subsampled uniformly without replacement and the largest
// component of the induced subgraph is kept.
inline FiniteMetricMeasureSpace space_from_graph(const GraphSpec& spec) {
  if (spec.node_count == 0) throw std::invalid_argument("graph: empty node set");
  auto adj = detail::adjacency_list(spec.node_count, spec.edges);

  if (!spec.node_budget || *spec.node_budget >= spec.node_count) {
    return detail::space_from_connected_graph(spec.node_count, adj);
  }

  const std::size_t budget = *spec.node_budget;
  if (budget == 0) throw std::invalid_argument("graph: node budget must be positive");
  Rng rng(spec.truncation_seed);
  std::vector<std::size_t> nodes(spec.node_count);
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  rng.shuffle(nodes);
  nodes.resize(budget);
  std::sort(nodes.begin(), nodes.end());
  std::vector<std::size_t> local(spec.node_count, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;

  std::vector<std::pair<std::size_t, std::size_t>> induced;
  for (const auto& [u, v] : spec.edges) {
    if (local[u] != static_cast<std::size_t>(-1) && local[v] != static_cast<std::size_t>(-1)) {
      induced.emplace_back(local[u], local[v]);
    }
  }
  auto sub_adj = detail::adjacency_list(budget, induced);
  const auto kept = detail::largest_component(sub_adj);
  if (kept.size() < 2) {
    throw std::invalid_argument("graph: truncation left fewer than two connected nodes");
  }
  std::vector<std::size_t> relabel(budget, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < kept.size(); ++i) relabel[kept[i]] = i;
  std::vector<std::pair<std::size_t, std::size_t>> kept_edges;
  for (const auto& [u, v] : induced) {
    if (relabel[u] != static_cast<std::size_t>(-1) && relabel[v] != static_cast<std::size_t>(-1)) {
      kept_edges.emplace_back(relabel[u], relabel[v]);
    }
  }
  return detail::space_from_connected_graph(kept.size(),
                                            detail::adjacency_list(kept.size(), kept_edges));
}

// Four-point spaces with identical pair-distance histograms but different
// distance-2 degree patterns: X's distance-2 graph is a perfect matching
// (the four-cycle metric), Y's shares a vertex.
inline FiniteMetricMeasureSpace space_counterexample_x() {
  const std::size_t m = 4;
  std::vector<double> dist(m * m, 1.0);
  for (std::size_t i = 0; i < m; ++i) dist[i * m + i] = 0.0;
  dist[0 * m + 2] = dist[2 * m + 0] = 2.0;
  dist[1 * m + 3] = dist[3 * m + 1] = 2.0;
  return FiniteMetricMeasureSpace::uniform(std::move(dist), m);
}

inline FiniteMetricMeasureSpace space_counterexample_y() {
  const std::size_t m = 4;
  std::vector<double> dist(m * m, 1.0);
  for (std::size_t i = 0; i < m; ++i) dist[i * m + i] = 0.0;
  dist[0 * m + 1] = dist[1 * m + 0] = 2.0;
  dist[0 * m + 2] = dist[2 * m + 0] = 2.0;
  return FiniteMetricMeasureSpace::uniform(std::move(dist), m);
}

enum class ShapeKind { kCircle, kEllipse };

struct ShapeCloudSpec {
  ShapeKind shape = ShapeKind::kCircle;
  std::size_t sample_count = 0;
  double eccentricity_shift = 0.0;  // Delta >= 0; minor axis scaled by 1 - Delta
  double noise_scale = 0.05;
  RngSeed seed{0};
  bool deterministic_angles = false;  // test hook: equally spaced, no randomness
};

// Points sampled on (cos t, (1 - Delta) sin t) with isotropic Gaussian
// noise, compared under pairwise Euclidean distance with uniform weights.
inline FiniteMetricMeasureSpace space_from_cloud(const ShapeCloudSpec& spec) {
  if (spec.sample_count < 2) throw std::invalid_argument("cloud: sample count must be >= 2");
  if (spec.noise_scale < 0.0) throw std::invalid_argument("cloud: noise scale must be >= 0");
  if (spec.eccentricity_shift < 0.0) throw std::invalid_argument("cloud: Delta must be >= 0");
  const double minor = spec.shape == ShapeKind::kCircle ? 1.0 : 1.0 - spec.eccentricity_shift;

  Rng rng(spec.seed);
  const std::size_t m = spec.sample_count;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = spec.deterministic_angles
                         ? 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m)
                         : 2.0 * std::numbers::pi * rng.next_double();
    xs[i] = std::cos(t);
    ys[i] = minor * std::sin(t);
    if (spec.noise_scale > 0.0) {
      xs[i] += spec.noise_scale * rng.next_gaussian();
      ys[i] += spec.noise_scale * rng.next_gaussian();
    }
  }
  std::vector<double> dist(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const double v = std::sqrt(dx * dx + dy * dy);
      dist[i * m + j] = v;
      dist[j * m + i] = v;
    }
  }
  return FiniteMetricMeasureSpace::uniform(std::move(dist), m);
}

struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  double within_prob = 0.0;
  double between_prob = 0.0;
  RngSeed seed{0};
  std::size_t retry_cap = 64;  // resamples before giving up on connectivity
};

// Stochastic block model graph metric; resamples the edge set until the
// graph is connected, up to the retry cap.
inline FiniteMetricMeasureSpace space_from_sbm(const SbmSpec& spec) {
  if (spec.within_prob < 0.0 || spec.within_prob > 1.0 || spec.between_prob < 0.0 ||
      spec.between_prob > 1.0) {
    throw std::invalid_argument("sbm: probabilities must lie in [0,1]");
  }
  std::size_t nodes = 0;
  for (std::size_t s : spec.block_sizes) nodes += s;
  if (nodes < 2) throw std::invalid_argument("sbm: needs at least two nodes");

  std::vector<std::size_t> block_of(nodes);
  {
    std::size_t at = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
      for (std::size_t k = 0; k < spec.block_sizes[b]; ++k) block_of[at++] = b;
    }
  }

  for (std::size_t attempt = 0; attempt <= spec.retry_cap; ++attempt) {
    Rng rng(child_seed(spec.seed, attempt));
    GraphSpec graph;
    graph.node_count = nodes;
    for (std::size_t u = 0; u < nodes; ++u) {
      for (std::size_t v = u + 1; v < nodes; ++v) {
        const double prob = block_of[u] == block_of[v] ? spec.within_prob : spec.between_prob;
        if (rng.next_double() < prob) graph.edges.emplace_back(u, v);
      }
    }
    try {
      return space_from_graph(graph);
    } catch (const std::invalid_argument&) {
      // disconnected sample; retry
    }
  }
  throw std::runtime_error("sbm: retry cap exceeded without a connected sample");
}

}  // namespace dmw
