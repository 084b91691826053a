#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmw/rng.hpp"

namespace dmw {

// Number of unordered pairs in an n-tuple.
constexpr std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Canonical ordering of pairs (i, j), 0 <= i < j < n: row-major over i,
// contiguous in j. pair_offset is a bijection onto {0, ..., pair_count(n)-1}.
inline std::size_t pair_offset(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= j || j >= n) {
    throw std::invalid_argument("pair_offset: requires 0 <= i < j < n");
  }
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

struct PairIndex {
  std::size_t i;
  std::size_t j;
};

inline PairIndex pair_from_offset(std::size_t offset, std::size_t n) {
  if (offset >= pair_count(n)) {
    throw std::invalid_argument("pair_from_offset: offset out of range");
  }
  std::size_t i = 0;
  std::size_t row = n - 1;  // pairs in row i
  while (offset >= row) {
    offset -= row;
    ++i;
    --row;
  }
  return PairIndex{i, i + 1 + offset};
}

// Pairwise-distance vector of one sampled n-tuple, in canonical pair order.
struct DistanceVector {
  std::size_t order = 0;
  std::vector<double> entries;

  DistanceVector() = default;
  DistanceVector(std::size_t n, std::vector<double> values)
      : order(n), entries(std::move(values)) {
    if (order < 2 || entries.size() != pair_count(order)) {
      throw std::invalid_argument("DistanceVector: entries must have length n(n-1)/2, n >= 2");
    }
  }
};

// Normalized pair-averaged p-norm distance between two same-order vectors:
// ((1/N) sum |a_e - b_e|^p)^(1/p).
inline double avg_norm(const DistanceVector& a, const DistanceVector& b, double p) {
  if (a.order != b.order) {
    throw std::invalid_argument("avg_norm: order mismatch");
  }
  if (p < 1.0) {
    throw std::invalid_argument("avg_norm: requires p >= 1");
  }
  const std::size_t count = a.entries.size();
  double acc = 0.0;
  if (p == 1.0) {
    for (std::size_t e = 0; e < count; ++e) acc += std::abs(a.entries[e] - b.entries[e]);
    return acc / static_cast<double>(count);
  }
  if (p == 2.0) {
    for (std::size_t e = 0; e < count; ++e) {
      const double d = a.entries[e] - b.entries[e];
      acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(count));
  }
  for (std::size_t e = 0; e < count; ++e) {
    acc += std::pow(std::abs(a.entries[e] - b.entries[e]), p);
  }
  return std::pow(acc / static_cast<double>(count), 1.0 / p);
}

enum class DirectionMode {
  // Scaled onto the boundary of the dual unit set: N^(1/p) * ||theta||_q = 1
  // with q the Holder conjugate of p, so <theta, .> is 1-Lipschitz for the
  // pair-averaged p-norm.
  kDual,
  // Unit Euclidean norm; changes only the scale of sliced statistics.
  kEuclidean,
};

struct SlicingDirection {
  std::size_t order = 0;
  double p = 1.0;
  DirectionMode mode = DirectionMode::kDual;
  std::vector<double> theta;
};

inline double project(const SlicingDirection& dir, const DistanceVector& a) {
  if (dir.order != a.order) {
    throw std::invalid_argument("project: order mismatch");
  }
  double acc = 0.0;
  for (std::size_t e = 0; e < a.entries.size(); ++e) acc += dir.theta[e] * a.entries[e];
  return acc;
}

inline SlicingDirection sample_direction(std::size_t n, double p, DirectionMode mode, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_direction: requires n >= 2");
  if (p < 1.0) throw std::invalid_argument("sample_direction: requires p >= 1");
  const std::size_t count = pair_count(n);
  std::vector<double> theta(count);
  for (auto& t : theta) t = rng.next_gaussian();

  double scale = 0.0;
  if (mode == DirectionMode::kEuclidean) {
    double sq = 0.0;
    for (double t : theta) sq += t * t;
    scale = std::sqrt(sq);
  } else if (p == 1.0) {
    // q = infinity: dual norm is N * max|theta_e|.
    double mx = 0.0;
    for (double t : theta) mx = std::max(mx, std::abs(t));
    scale = static_cast<double>(count) * mx;
  } else {
    const double q = p / (p - 1.0);
    double acc = 0.0;
    for (double t : theta) acc += std::pow(std::abs(t), q);
    scale = std::pow(static_cast<double>(count), 1.0 / p) * std::pow(acc, 1.0 / q);
  }
  if (scale <= 0.0 || !std::isfinite(scale)) {
    throw std::runtime_error("sample_direction: degenerate Gaussian draw");
  }
  for (auto& t : theta) t /= scale;
  return SlicingDirection{n, p, mode, std::move(theta)};
}

inline SlicingDirection sample_direction(std::size_t n, double p, DirectionMode mode,
                                         RngSeed seed) {
  Rng rng(seed);
  return sample_direction(n, p, mode, rng);
}

}  // namespace dmw
