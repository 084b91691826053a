#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dmw/kernels.hpp"
#include "dmw/rng.hpp"

namespace dmw {

// Unbiased MMD^2 between the two label groups of a precomputed Gram matrix.
inline double mmd2_unbiased(const GramMatrix& gram, const std::vector<int>& labels) {
  if (labels.size() != gram.size) {
    throw std::invalid_argument("mmd2_unbiased: label count must match Gram size");
  }
  std::vector<std::size_t> group_a, group_b;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 0 ? group_a : group_b).push_back(i);
  }
  const std::size_t a = group_a.size();
  const std::size_t b = group_b.size();
  if (a < 2 || b < 2) {
    throw std::invalid_argument("mmd2_unbiased: each group needs at least two members");
  }

  double within_a = 0.0, within_b = 0.0, across = 0.0;
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < a; ++j) {
      if (i != j) within_a += gram.at(group_a[i], group_a[j]);
    }
  }
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (i != j) within_b += gram.at(group_b[i], group_b[j]);
    }
  }
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) across += gram.at(group_a[i], group_b[j]);
  }
  return within_a / static_cast<double>(a * (a - 1)) +
         within_b / static_cast<double>(b * (b - 1)) -
         2.0 * across / static_cast<double>(a * b);
}

struct TwoSampleResult {
  double statistic = 0.0;
  std::size_t permutation_count = 0;
  double p_value = 1.0;
  std::vector<double> null_statistics;
  double alpha = 0.05;
  bool reject = false;
};

// Exact permutation two-sample test on a FIXED Gram matrix: labels are
// permuted uniformly (group sizes preserved), MMD^2 recomputed, p-value with
// the +1 correction.
inline TwoSampleResult permutation_test(const GramMatrix& gram, const std::vector<int>& labels,
                                        std::size_t permutations, double alpha, RngSeed seed) {
  if (permutations < 1) throw std::invalid_argument("permutation_test: P must be >= 1");
  TwoSampleResult result;
  result.statistic = mmd2_unbiased(gram, labels);
  result.permutation_count = permutations;
  result.alpha = alpha;
  result.null_statistics.reserve(permutations);

  Rng rng(seed);
  std::vector<int> permuted = labels;
  std::size_t at_least = 0;
  for (std::size_t rep = 0; rep < permutations; ++rep) {
    rng.shuffle(permuted);
    const double stat = mmd2_unbiased(gram, permuted);
    result.null_statistics.push_back(stat);
    if (stat >= result.statistic) ++at_least;
  }
  result.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  result.reject = result.p_value <= alpha;
  return result;
}

}  // namespace dmw
