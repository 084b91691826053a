#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dmw {

// Weighted point set on the real line. The uniform equal-size case is the
// fast path used by slicing; general weights arise from enumerated laws.
struct DiscreteMeasure1D {
  std::vector<double> values;
  std::vector<double> weights;  // empty means uniform 1/K

  std::size_t size() const { return values.size(); }
};

namespace detail {

inline double pow_cost(double diff, double p) {
  const double a = std::abs(diff);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

}  // namespace detail

// W_p^p between two sorted uniform samples of equal size:
// (1/K) sum |a_(k) - b_(k)|^p. Inputs must already be sorted.
inline double w1d_pth_power_sorted_uniform(const std::vector<double>& a_sorted,
                                           const std::vector<double>& b_sorted, double p) {
  if (a_sorted.empty() || a_sorted.size() != b_sorted.size()) {
    throw std::invalid_argument("w1d_pth_power_sorted_uniform: equal nonempty sizes required");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a_sorted.size(); ++k) {
    acc += detail::pow_cost(a_sorted[k] - b_sorted[k], p);
  }
  return acc / static_cast<double>(a_sorted.size());
}

// Exact W_p^p between two weighted 1D measures via the quantile coupling,
// computed with a two-pointer merge over the sorted supports.
inline double w1d_pth_power(const DiscreteMeasure1D& a, const DiscreteMeasure1D& b, double p) {
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("w1d_pth_power: empty measure");
  }
  if (p < 1.0) throw std::invalid_argument("w1d_pth_power: requires p >= 1");

  const bool uniform_fast =
      a.weights.empty() && b.weights.empty() && a.size() == b.size();

  auto sorted_order = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    return idx;
  };

  if (uniform_fast) {
    std::vector<double> av = a.values;
    std::vector<double> bv = b.values;
    std::sort(av.begin(), av.end());
    std::sort(bv.begin(), bv.end());
    return w1d_pth_power_sorted_uniform(av, bv, p);
  }

  const auto ia = sorted_order(a.values);
  const auto ib = sorted_order(b.values);
  auto weight_of = [](const DiscreteMeasure1D& m, std::size_t k) {
    return m.weights.empty() ? 1.0 / static_cast<double>(m.size()) : m.weights[k];
  };

  double cost = 0.0;
  std::size_t ka = 0, kb = 0;
  double ra = weight_of(a, ia[0]);
  double rb = weight_of(b, ib[0]);
  while (ka < ia.size() && kb < ib.size()) {
    const double mass = std::min(ra, rb);
    cost += mass * detail::pow_cost(a.values[ia[ka]] - b.values[ib[kb]], p);
    ra -= mass;
    rb -= mass;
    if (ra <= 1e-15) {
      ++ka;
      if (ka < ia.size()) ra = weight_of(a, ia[ka]);
    }
    if (rb <= 1e-15) {
      ++kb;
      if (kb < ib.size()) rb = weight_of(b, ib[kb]);
    }
  }
  return cost;
}

}  // namespace dmw
