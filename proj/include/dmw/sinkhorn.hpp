#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmw/exact_ot.hpp"

namespace dmw {

struct SinkhornConfig {
  double epsilon = 1e-2;
  std::size_t max_iters = 10000;
  double tol = 1e-7;  // marginal residual max-norm
};

struct SinkhornReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double epsilon = 0.0;
  double tol = 0.0;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return mx + std::log(acc);
}

}  // namespace detail

// Entropic OT via log-domain Sinkhorn scaling. Stops when the marginal
// residual max-norm drops below tol or the iteration budget runs out; the
// report records which happened.
inline TransportPlan sinkhorn(const CostMatrix& cost, const std::vector<double>& a,
                              const std::vector<double>& b, const SinkhornConfig& config,
                              SinkhornReport* report = nullptr) {
  if (config.epsilon <= 0.0) {
    throw std::invalid_argument("sinkhorn: epsilon must be positive");
  }
  detail::check_marginals(cost, a, b);

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] > 0.0) cols.push_back(j);
  }
  const std::size_t r = rows.size();
  const std::size_t c = cols.size();
  const double eps = config.epsilon;

  std::vector<double> log_a(r), log_b(c);
  for (std::size_t i = 0; i < r; ++i) log_a[i] = std::log(a[rows[i]]);
  for (std::size_t j = 0; j < c; ++j) log_b[j] = std::log(b[cols[j]]);

  // Potentials f, g; coupling is exp((f_i + g_j - C_ij) / eps).
  std::vector<double> f(r, 0.0), g(c, 0.0);
  std::vector<double> scratch(std::max(r, c));

  auto coupling_at = [&](std::size_t i, std::size_t j) {
    return std::exp((f[i] + g[j] - cost.at(rows[i], cols[j])) / eps);
  };
  auto max_residual = [&]() {
    double res = 0.0;
    std::vector<double> col_sum(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      double row_sum = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        const double v = coupling_at(i, j);
        row_sum += v;
        col_sum[j] += v;
      }
      res = std::max(res, std::abs(row_sum - a[rows[i]]));
    }
    for (std::size_t j = 0; j < c; ++j) res = std::max(res, std::abs(col_sum[j] - b[cols[j]]));
    return res;
  };

  SinkhornReport rep;
  rep.epsilon = eps;
  rep.tol = config.tol;
  double residual = max_residual();
  std::size_t iter = 0;
  while (iter < config.max_iters && residual >= config.tol) {
    // f_i <- eps * (log a_i - LSE_j((g_j - C_ij)/eps))
    for (std::size_t i = 0; i < r; ++i) {
      scratch.resize(c);
      for (std::size_t j = 0; j < c; ++j) {
        scratch[j] = (g[j] - cost.at(rows[i], cols[j])) / eps;
      }
      f[i] = eps * (log_a[i] - detail::log_sum_exp(scratch));
      if (!std::isfinite(f[i])) {
        throw std::runtime_error("sinkhorn: non-finite potential at epsilon=" +
                                 std::to_string(eps));
      }
    }
    for (std::size_t j = 0; j < c; ++j) {
      scratch.resize(r);
      for (std::size_t i = 0; i < r; ++i) {
        scratch[i] = (f[i] - cost.at(rows[i], cols[j])) / eps;
      }
      g[j] = eps * (log_b[j] - detail::log_sum_exp(scratch));
      if (!std::isfinite(g[j])) {
        throw std::runtime_error("sinkhorn: non-finite potential at epsilon=" +
                                 std::to_string(eps));
      }
    }
    ++iter;
    residual = max_residual();
  }
  rep.iterations = iter;
  rep.final_residual = residual;
  rep.converged = residual < config.tol;

  TransportPlan plan;
  plan.rows = cost.rows;
  plan.cols = cost.cols;
  plan.coupling.assign(cost.rows * cost.cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double v = coupling_at(i, j);
      plan.at(rows[i], cols[j]) = v;
      total += v * cost.at(rows[i], cols[j]);
    }
  }
  plan.cost = total;
  plan.converged = rep.converged;
  plan.iterations = iter;
  detail::fill_residuals(plan, a, b);
  if (report) *report = rep;
  return plan;
}

}  // namespace dmw
