#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "dmw/core.hpp"
#include "dmw/rng.hpp"
#include "dmw/spaces.hpp"

namespace dmw {

// Weighted atoms in R^(N_n): either K sampled distance vectors with uniform
// weights, or the exactly enumerated law of a tiny space with general
// weights.
struct EmpiricalMatrixLaw {
  std::size_t order = 0;
  std::size_t atom_count = 0;
  std::vector<double> atoms;    // atom_count x pair_count(order), row-major
  std::vector<double> weights;  // simplex

  DistanceVector atom(std::size_t k) const {
    const std::size_t width = pair_count(order);
    return DistanceVector(order, std::vector<double>(atoms.begin() + k * width,
                                                     atoms.begin() + (k + 1) * width));
  }
};

namespace detail {

// Draws one index from the space's weight vector. Uniform weights take the
// direct path; general weights binary-search the cumulative sums.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const FiniteMetricMeasureSpace& space) : size_(space.size()) {
    const auto& w = space.weights();
    uniform_ = true;
    const double u = 1.0 / static_cast<double>(size_);
    for (double v : w) {
      if (std::abs(v - u) > 1e-15) {
        uniform_ = false;
        break;
      }
    }
    if (!uniform_) {
      cumulative_.resize(size_);
      double acc = 0.0;
      for (std::size_t i = 0; i < size_; ++i) {
        acc += w[i];
        cumulative_[i] = acc;
      }
      cumulative_.back() = 1.0;
    }
  }

  std::size_t draw(Rng& rng) const {
    if (uniform_) return rng.next_index(size_);
    const double u = rng.next_double();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::size_t size_;
  bool uniform_;
  std::vector<double> cumulative_;
};

inline void fill_distance_entries(const FiniteMetricMeasureSpace& space,
                                  const std::vector<std::size_t>& tuple, double* out) {
  const std::size_t n = tuple.size();
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out[e++] = space.d(tuple[i], tuple[j]);
    }
  }
}

}  // namespace detail

// K i.i.d. n-tuples (with replacement, per the space's measure), each mapped
// to its pairwise distance vector.
inline EmpiricalMatrixLaw sample_matrix_law(const FiniteMetricMeasureSpace& space, std::size_t n,
                                            std::size_t count, RngSeed seed) {
  if (n < 2) throw std::invalid_argument("sample_matrix_law: requires n >= 2");
  if (count < 1) throw std::invalid_argument("sample_matrix_law: requires K >= 1");
  Rng rng(seed);
  detail::CategoricalSampler sampler(space);
  const std::size_t width = pair_count(n);

  EmpiricalMatrixLaw law;
  law.order = n;
  law.atom_count = count;
  law.atoms.resize(count * width);
  law.weights.assign(count, 1.0 / static_cast<double>(count));
  std::vector<std::size_t> tuple(n);
  for (std::size_t k = 0; k < count; ++k) {
    for (auto& t : tuple) t = sampler.draw(rng);
    detail::fill_distance_entries(space, tuple, law.atoms.data() + k * width);
  }
  return law;
}

// Exact order-n law by exhausting all m^n ordered tuples; duplicate distance
// vectors are merged (exact lexicographic comparison) and their tuple
// probabilities summed. Guarded by the m^n enumeration budget.
inline EmpiricalMatrixLaw enumerate_matrix_law(const FiniteMetricMeasureSpace& space,
                                               std::size_t n,
                                               std::size_t budget = 1000000) {
  if (n < 2) throw std::invalid_argument("enumerate_matrix_law: requires n >= 2");
  const std::size_t m = space.size();
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(m);
  if (total > static_cast<double>(budget)) {
    throw std::invalid_argument("enumerate_matrix_law: m^n = " + std::to_string(total) +
                                " exceeds enumeration budget");
  }

  const std::size_t width = pair_count(n);
  std::map<std::vector<double>, double> merged;
  std::vector<std::size_t> tuple(n, 0);
  std::vector<double> entries(width);
  const auto& w = space.weights();
  while (true) {
    detail::fill_distance_entries(space, tuple, entries.data());
    double prob = 1.0;
    for (std::size_t i : tuple) prob *= w[i];
    if (prob > 0.0) merged[entries] += prob;

    // odometer increment
    std::size_t pos = n;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < m) {
        done = false;
        break;
      }
      tuple[pos] = 0;
    }
    if (done) break;
  }

  EmpiricalMatrixLaw law;
  law.order = n;
  law.atom_count = merged.size();
  law.atoms.reserve(merged.size() * width);
  law.weights.reserve(merged.size());
  for (const auto& [vec, prob] : merged) {
    law.atoms.insert(law.atoms.end(), vec.begin(), vec.end());
    law.weights.push_back(prob);
  }
  return law;
}

}  // namespace dmw
