#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmw/core.hpp"
#include "dmw/exact_ot.hpp"
#include "dmw/matrix_law.hpp"
#include "dmw/ot1d.hpp"
#include "dmw/sinkhorn.hpp"
#include "dmw/spaces.hpp"

namespace dmw {

enum class DmwMode { kExactEnumerated, kEmpiricalExactOt, kEmpiricalSinkhorn, kSliced };

struct DmwEstimate {
  double value = 0.0;
  double p = 1.0;
  std::vector<std::size_t> orders;
  std::size_t tuple_budget = 0;      // K, when applicable
  std::size_t direction_budget = 0;  // L, when applicable
  DmwMode mode = DmwMode::kEmpiricalExactOt;
  RngSeed seed{0};
  std::vector<double> per_scale;  // populated by the multi-scale estimator
  SinkhornReport sinkhorn_report;
};

enum class OtSolverKind { kExact, kSinkhorn };

struct OtSolverConfig {
  OtSolverKind kind = OtSolverKind::kExact;
  SinkhornConfig sinkhorn;
};

// Ground cost between two matrix laws: avg_norm(a, b, p)^p per atom pair.
inline CostMatrix law_cost_matrix(const EmpiricalMatrixLaw& law_x,
                                  const EmpiricalMatrixLaw& law_y, double p) {
  if (law_x.order != law_y.order) {
    throw std::invalid_argument("law_cost_matrix: order mismatch");
  }
  const std::size_t width = pair_count(law_x.order);
  CostMatrix cost(law_x.atom_count, law_y.atom_count, p);
  for (std::size_t i = 0; i < law_x.atom_count; ++i) {
    const double* a = law_x.atoms.data() + i * width;
    for (std::size_t j = 0; j < law_y.atom_count; ++j) {
      const double* b = law_y.atoms.data() + j * width;
      double acc = 0.0;
      if (p == 1.0) {
        for (std::size_t e = 0; e < width; ++e) acc += std::abs(a[e] - b[e]);
      } else if (p == 2.0) {
        for (std::size_t e = 0; e < width; ++e) {
          const double d = a[e] - b[e];
          acc += d * d;
        }
      } else {
        for (std::size_t e = 0; e < width; ++e) acc += std::pow(std::abs(a[e] - b[e]), p);
      }
      cost.at(i, j) = acc / static_cast<double>(width);
    }
  }
  return cost;
}

// W_p between two matrix laws under the pair-averaged norm; the backbone of
// both the exact-enumerated and empirical estimators.
inline DmwEstimate empirical_dmw(const EmpiricalMatrixLaw& law_x, const EmpiricalMatrixLaw& law_y,
                                 double p, const OtSolverConfig& solver = {}) {
  if (p < 1.0) throw std::invalid_argument("empirical_dmw: requires p >= 1");
  const CostMatrix cost = law_cost_matrix(law_x, law_y, p);
  DmwEstimate estimate;
  estimate.p = p;
  estimate.orders = {law_x.order};
  if (solver.kind == OtSolverKind::kExact) {
    const TransportPlan plan = exact_ot(cost, law_x.weights, law_y.weights);
    estimate.value = std::pow(std::max(plan.cost, 0.0), 1.0 / p);
    estimate.mode = DmwMode::kEmpiricalExactOt;
  } else {
    SinkhornReport report;
    const TransportPlan plan =
        sinkhorn(cost, law_x.weights, law_y.weights, solver.sinkhorn, &report);
    estimate.value = std::pow(std::max(plan.cost, 0.0), 1.0 / p);
    estimate.mode = DmwMode::kEmpiricalSinkhorn;
    estimate.sinkhorn_report = report;
  }
  return estimate;
}

// Exact DMW at order n via full enumeration; only valid for tiny spaces.
inline DmwEstimate exact_dmw(const FiniteMetricMeasureSpace& space_x,
                             const FiniteMetricMeasureSpace& space_y, std::size_t n, double p,
                             std::size_t budget = 1000000) {
  const auto law_x = enumerate_matrix_law(space_x, n, budget);
  const auto law_y = enumerate_matrix_law(space_y, n, budget);
  DmwEstimate estimate = empirical_dmw(law_x, law_y, p);
  estimate.mode = DmwMode::kExactEnumerated;
  return estimate;
}

struct SlicedConfig {
  std::size_t order = 2;
  std::size_t tuple_count = 128;     // K
  std::size_t direction_count = 64;  // L
  double p = 1.0;
  DirectionMode mode = DirectionMode::kEuclidean;
  bool streaming = false;  // O(K)-memory layout; identical output per seed
};

// Per-space tuple-sampling seeds are explicit so callers can share atom
// streams across comparisons (self-comparison is then exactly zero).
struct SlicedSeeds {
  RngSeed directions;
  RngSeed tuples_x;
  RngSeed tuples_y;
};

inline SlicedSeeds derive_sliced_seeds(RngSeed seed) {
  return SlicedSeeds{child_seed(seed, 0), child_seed(seed, 1), child_seed(seed, 2)};
}

namespace detail {

// Projection table: projected[l * K + k] = <theta_l, atom_k>.
inline std::vector<double> project_law(const std::vector<SlicingDirection>& directions,
                                       const EmpiricalMatrixLaw& law) {
  const std::size_t width = pair_count(law.order);
  std::vector<double> projected(directions.size() * law.atom_count);
  for (std::size_t l = 0; l < directions.size(); ++l) {
    const auto& theta = directions[l].theta;
    for (std::size_t k = 0; k < law.atom_count; ++k) {
      const double* atom = law.atoms.data() + k * width;
      double acc = 0.0;
      for (std::size_t e = 0; e < width; ++e) acc += theta[e] * atom[e];
      projected[l * law.atom_count + k] = acc;
    }
  }
  return projected;
}

// Streaming layout: one tuple at a time, projections accumulated per
// direction, distance vector discarded. Same arithmetic order per entry as
// project_law, so the two layouts agree bit-for-bit.
inline std::vector<double> stream_projections(const FiniteMetricMeasureSpace& space,
                                              std::size_t n, std::size_t count,
                                              const std::vector<SlicingDirection>& directions,
                                              RngSeed tuple_seed) {
  Rng rng(tuple_seed);
  CategoricalSampler sampler(space);
  const std::size_t width = pair_count(n);
  std::vector<double> projected(directions.size() * count);
  std::vector<std::size_t> tuple(n);
  std::vector<double> entries(width);
  for (std::size_t k = 0; k < count; ++k) {
    for (auto& t : tuple) t = sampler.draw(rng);
    fill_distance_entries(space, tuple, entries.data());
    for (std::size_t l = 0; l < directions.size(); ++l) {
      const auto& theta = directions[l].theta;
      double acc = 0.0;
      for (std::size_t e = 0; e < width; ++e) acc += theta[e] * entries[e];
      projected[l * count + k] = acc;
    }
  }
  return projected;
}

}  // namespace detail

// Sliced DMW: sample K tuples per space, project onto L random directions,
// and average the sorted one-dimensional transport costs.
inline DmwEstimate sliced_dmw(const FiniteMetricMeasureSpace& space_x,
                              const FiniteMetricMeasureSpace& space_y, const SlicedConfig& config,
                              const SlicedSeeds& seeds) {
  if (config.order < 2) throw std::invalid_argument("sliced_dmw: requires n >= 2");
  if (config.tuple_count < 1 || config.direction_count < 1) {
    throw std::invalid_argument("sliced_dmw: budgets must be positive");
  }
  if (config.p < 1.0) throw std::invalid_argument("sliced_dmw: requires p >= 1");

  Rng dir_rng(seeds.directions);
  std::vector<SlicingDirection> directions;
  directions.reserve(config.direction_count);
  for (std::size_t l = 0; l < config.direction_count; ++l) {
    directions.push_back(sample_direction(config.order, config.p, config.mode, dir_rng));
  }

  const std::size_t count = config.tuple_count;
  std::vector<double> proj_x, proj_y;
  if (config.streaming) {
    proj_x = detail::stream_projections(space_x, config.order, count, directions, seeds.tuples_x);
    proj_y = detail::stream_projections(space_y, config.order, count, directions, seeds.tuples_y);
  } else {
    const auto law_x = sample_matrix_law(space_x, config.order, count, seeds.tuples_x);
    const auto law_y = sample_matrix_law(space_y, config.order, count, seeds.tuples_y);
    proj_x = detail::project_law(directions, law_x);
    proj_y = detail::project_law(directions, law_y);
  }

  double mean_cost = 0.0;
  std::vector<double> a(count), b(count);
  for (std::size_t l = 0; l < config.direction_count; ++l) {
    std::copy_n(proj_x.begin() + l * count, count, a.begin());
    std::copy_n(proj_y.begin() + l * count, count, b.begin());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    mean_cost += w1d_pth_power_sorted_uniform(a, b, config.p);
  }
  mean_cost /= static_cast<double>(config.direction_count);

  DmwEstimate estimate;
  estimate.value = std::pow(mean_cost, 1.0 / config.p);
  estimate.p = config.p;
  estimate.orders = {config.order};
  estimate.tuple_budget = count;
  estimate.direction_budget = config.direction_count;
  estimate.mode = DmwMode::kSliced;
  estimate.seed = seeds.directions;
  return estimate;
}

inline DmwEstimate sliced_dmw(const FiniteMetricMeasureSpace& space_x,
                              const FiniteMetricMeasureSpace& space_y, const SlicedConfig& config,
                              RngSeed seed) {
  DmwEstimate estimate = sliced_dmw(space_x, space_y, config, derive_sliced_seeds(seed));
  estimate.seed = seed;
  return estimate;
}

// Scale set with simplex weights.
struct ScaleWeights {
  std::vector<std::size_t> scales;
  std::vector<double> weights;

  void validate() const {
    if (scales.empty() || scales.size() != weights.size()) {
      throw std::invalid_argument("scale weights: scales and weights must match and be nonempty");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("scale weights: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("scale weights: weights must sum to 1");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (scales[i] < 2) throw std::invalid_argument("scale weights: scales must be >= 2");
      for (std::size_t j = i + 1; j < scales.size(); ++j) {
        if (scales[i] == scales[j]) {
          throw std::invalid_argument("scale weights: duplicate scale");
        }
      }
    }
  }
};

// Softmin scale weights: alpha_n = exp(-B_n / tau) / sum_m exp(-B_m / tau),
// computed in shifted form.
inline ScaleWeights softmin_weights(const std::vector<std::size_t>& scales,
                                    const std::vector<double>& bounds, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("softmin_weights: tau must be positive");
  if (scales.empty() || scales.size() != bounds.size()) {
    throw std::invalid_argument("softmin_weights: scales and bounds must match");
  }
  double min_bound = bounds[0];
  for (double b : bounds) {
    if (!std::isfinite(b)) throw std::invalid_argument("softmin_weights: non-finite bound");
    min_bound = std::min(min_bound, b);
  }
  std::vector<double> weights(bounds.size());
  double total = 0.0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    weights[i] = std::exp(-(bounds[i] - min_bound) / tau);
    total += weights[i];
  }
  for (auto& w : weights) w /= total;
  ScaleWeights result{scales, std::move(weights)};
  result.validate();
  return result;
}

struct MultiScaleConfig {
  ScaleWeights weights;
  bool sliced = true;            // sliced per-scale estimator vs exact enumeration
  SlicedConfig sliced_template;  // order is overridden per scale
  OtSolverConfig exact_solver;   // used when sliced == false
  std::size_t enumeration_budget = 1000000;
};

// alpha-weighted combination of per-scale estimates; per-scale values are
// exposed for auditing the linear-combination identity.
inline DmwEstimate multiscale_dmw(const FiniteMetricMeasureSpace& space_x,
                                  const FiniteMetricMeasureSpace& space_y,
                                  const MultiScaleConfig& config, RngSeed seed) {
  config.weights.validate();
  DmwEstimate total;
  total.p = config.sliced ? config.sliced_template.p : 1.0;
  total.seed = seed;
  total.orders = config.weights.scales;
  total.mode = config.sliced ? DmwMode::kSliced : DmwMode::kExactEnumerated;
  double acc = 0.0;
  for (std::size_t s = 0; s < config.weights.scales.size(); ++s) {
    const std::size_t n = config.weights.scales[s];
    double value = 0.0;
    if (config.sliced) {
      SlicedConfig per_scale = config.sliced_template;
      per_scale.order = n;
      value = sliced_dmw(space_x, space_y, per_scale, child_seed(seed, s)).value;
      total.tuple_budget = per_scale.tuple_count;
      total.direction_budget = per_scale.direction_count;
    } else {
      const auto law_x = enumerate_matrix_law(space_x, n, config.enumeration_budget);
      const auto law_y = enumerate_matrix_law(space_y, n, config.enumeration_budget);
      value = empirical_dmw(law_x, law_y, total.p, config.exact_solver).value;
    }
    total.per_scale.push_back(value);
    acc += config.weights.weights[s] * value;
  }
  total.value = acc;
  return total;
}

struct HierarchyReport {
  std::vector<std::size_t> orders;
  std::vector<double> values;
  bool monotone = true;  // non-decreasing within 1e-9 slack
};

// Exact per-order DMW sequence; Prop.-style monotonicity is checked with a
// 1e-9 slack.
inline HierarchyReport hierarchy_check(const FiniteMetricMeasureSpace& space_x,
                                       const FiniteMetricMeasureSpace& space_y,
                                       const std::vector<std::size_t>& orders, double p,
                                       std::size_t budget = 1000000) {
  HierarchyReport report;
  report.orders = orders;
  for (std::size_t n : orders) {
    report.values.push_back(exact_dmw(space_x, space_y, n, p, budget).value);
  }
  for (std::size_t i = 0; i + 1 < report.values.size(); ++i) {
    if (report.values[i + 1] < report.values[i] - 1e-9) report.monotone = false;
  }
  return report;
}

}  // namespace dmw
