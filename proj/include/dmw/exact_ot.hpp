#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dmw {

// Dense nonnegative ground-cost matrix; `exponent` records the p used to
// build entries so downstream code can take the matching root.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major
  double exponent = 1.0;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double p = 1.0)
      : rows(r), cols(c), data(r * c, 0.0), exponent(p) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Coupling with prescribed marginals plus the cost it realizes.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> coupling;  // row-major
  double cost = 0.0;
  double dual_objective = 0.0;
  double max_row_residual = 0.0;
  double max_col_residual = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  double& at(std::size_t i, std::size_t j) { return coupling[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return coupling[i * cols + j]; }
};

namespace detail {

inline void check_marginals(const CostMatrix& cost, const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != cost.rows || b.size() != cost.cols) {
    throw std::invalid_argument("exact_ot: marginal sizes do not match cost matrix");
  }
  double sa = 0.0, sb = 0.0;
  for (double w : a) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("exact_ot: negative weight");
    sa += w;
  }
  for (double w : b) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("exact_ot: negative weight");
    sb += w;
  }
  if (std::abs(sa - sb) > 1e-9 || sa <= 0.0) {
    throw std::invalid_argument("exact_ot: marginal sums differ by more than 1e-9");
  }
  for (double v : cost.data) {
    if (!std::isfinite(v)) throw std::invalid_argument("exact_ot: non-finite cost entry");
  }
}

inline void fill_residuals(TransportPlan& plan, const std::vector<double>& a,
                           const std::vector<double>& b) {
  plan.max_row_residual = 0.0;
  plan.max_col_residual = 0.0;
  std::vector<double> col_sum(plan.cols, 0.0);
  for (std::size_t i = 0; i < plan.rows; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < plan.cols; ++j) {
      const double g = plan.at(i, j);
      row_sum += g;
      col_sum[j] += g;
    }
    plan.max_row_residual = std::max(plan.max_row_residual, std::abs(row_sum - a[i]));
  }
  for (std::size_t j = 0; j < plan.cols; ++j) {
    plan.max_col_residual = std::max(plan.max_col_residual, std::abs(col_sum[j] - b[j]));
  }
}

// Transportation simplex state. The basis is a spanning tree on the bipartite
// node set (rows, then cols); potentials are recomputed by traversal after
// each pivot.
class TransportationSimplex {
 public:
  TransportationSimplex(const CostMatrix& cost, std::vector<double> a, std::vector<double> b)
      : cost_(cost),
        a_(std::move(a)),
        b_(std::move(b)),
        r_(cost.rows),
        c_(cost.cols),
        basic_(cost.rows * cost.cols, false),
        flow_(cost.rows * cost.cols, 0.0),
        u_(cost.rows, 0.0),
        v_(cost.cols, 0.0) {}

  TransportPlan solve() {
    vogel_initialize();
    complete_basis();
    compute_potentials();

    const std::size_t max_pivots = 200 * (r_ + c_) * std::max<std::size_t>(r_ + c_, 64);
    std::size_t pivots = 0;
    std::size_t stalled = 0;
    double last_objective = objective();
    while (true) {
      // Dantzig entering while progress is made; Bland's least-index rule
      // once the objective stalls, which guarantees termination under
      // degeneracy.
      const bool bland = stalled > r_ + c_;
      std::size_t enter = find_entering(bland);
      if (enter == npos) break;
      pivot(enter);
      if (++pivots > max_pivots) {
        throw std::runtime_error("exact_ot: pivot limit exceeded");
      }
      const double obj = objective();
      if (obj < last_objective - 1e-15) {
        stalled = 0;
        last_objective = obj;
      } else {
        ++stalled;
      }
      compute_potentials();
    }

    TransportPlan plan;
    plan.rows = r_;
    plan.cols = c_;
    plan.coupling = flow_;
    plan.cost = objective();
    plan.iterations = pivots;
    plan.dual_objective = 0.0;
    for (std::size_t i = 0; i < r_; ++i) plan.dual_objective += u_[i] * a_[i];
    for (std::size_t j = 0; j < c_; ++j) plan.dual_objective += v_[j] * b_[j];
    fill_residuals(plan, a_, b_);
    return plan;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t cell(std::size_t i, std::size_t j) const { return i * c_ + j; }

  double objective() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < flow_.size(); ++k) {
      if (flow_[k] != 0.0) acc += flow_[k] * cost_.data[k];
    }
    return acc;
  }

  // Vogel's approximation: repeatedly ship along the cheapest cell of the
  // row/col with the largest regret (gap between two cheapest costs).
  void vogel_initialize() {
    std::vector<double> supply = a_;
    std::vector<double> demand = b_;
    std::vector<bool> row_done(r_, false), col_done(c_, false);
    std::size_t active_rows = r_, active_cols = c_;

    auto cheapest_two_in_row = [&](std::size_t i, std::size_t& jmin, double& c1, double& c2) {
      c1 = c2 = std::numeric_limits<double>::infinity();
      jmin = npos;
      for (std::size_t j = 0; j < c_; ++j) {
        if (col_done[j]) continue;
        const double v = cost_.at(i, j);
        if (v < c1) {
          c2 = c1;
          c1 = v;
          jmin = j;
        } else if (v < c2) {
          c2 = v;
        }
      }
    };
    auto cheapest_two_in_col = [&](std::size_t j, std::size_t& imin, double& c1, double& c2) {
      c1 = c2 = std::numeric_limits<double>::infinity();
      imin = npos;
      for (std::size_t i = 0; i < r_; ++i) {
        if (row_done[i]) continue;
        const double v = cost_.at(i, j);
        if (v < c1) {
          c2 = c1;
          c1 = v;
          imin = i;
        } else if (v < c2) {
          c2 = v;
        }
      }
    };

    while (active_rows > 0 && active_cols > 0) {
      double best_regret = -1.0;
      bool best_is_row = true;
      std::size_t best_line = npos, best_other = npos;
      for (std::size_t i = 0; i < r_; ++i) {
        if (row_done[i]) continue;
        std::size_t jmin;
        double c1, c2;
        cheapest_two_in_row(i, jmin, c1, c2);
        const double regret = std::isfinite(c2) ? c2 - c1 : c1;
        if (regret > best_regret) {
          best_regret = regret;
          best_is_row = true;
          best_line = i;
          best_other = jmin;
        }
      }
      for (std::size_t j = 0; j < c_; ++j) {
        if (col_done[j]) continue;
        std::size_t imin;
        double c1, c2;
        cheapest_two_in_col(j, imin, c1, c2);
        const double regret = std::isfinite(c2) ? c2 - c1 : c1;
        if (regret > best_regret) {
          best_regret = regret;
          best_is_row = false;
          best_line = j;
          best_other = imin;
        }
      }
      if (best_line == npos || best_other == npos) break;

      const std::size_t i = best_is_row ? best_line : best_other;
      const std::size_t j = best_is_row ? best_other : best_line;
      const double shipped = std::min(supply[i], demand[j]);
      flow_[cell(i, j)] = shipped;
      basic_[cell(i, j)] = true;
      supply[i] -= shipped;
      demand[j] -= shipped;

      // Close exactly one line per step so the basis stays a forest with at
      // most r + c - 1 cells; ties close the row unless it is the last one.
      if (supply[i] <= 1e-15 && (demand[j] > 1e-15 || active_rows > 1)) {
        row_done[i] = true;
        --active_rows;
      } else {
        col_done[j] = true;
        --active_cols;
      }
    }
  }

  // Adds degenerate zero cells until the basis forms a spanning tree of
  // r + c nodes (r + c - 1 cells).
  void complete_basis() {
    // Union-find over nodes: rows 0..r-1, cols r..r+c-1.
    std::vector<std::size_t> parent(r_ + c_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<std::size_t> find_stack;
    auto find = [&](std::size_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };

    std::size_t count = 0;
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t j = 0; j < c_; ++j) {
        if (!basic_[cell(i, j)]) continue;
        const std::size_t ri = find(i);
        const std::size_t rj = find(r_ + j);
        if (ri == rj) {
          // Redundant degenerate cell; drop it to keep the basis a forest.
          basic_[cell(i, j)] = false;
          continue;
        }
        parent[ri] = rj;
        ++count;
      }
    }
    for (std::size_t i = 0; i < r_ && count + 1 < r_ + c_; ++i) {
      for (std::size_t j = 0; j < c_ && count + 1 < r_ + c_; ++j) {
        if (basic_[cell(i, j)]) continue;
        const std::size_t ri = find(i);
        const std::size_t rj = find(r_ + j);
        if (ri == rj) continue;
        parent[ri] = rj;
        basic_[cell(i, j)] = true;
        ++count;
      }
    }
  }

  void build_adjacency(std::vector<std::vector<std::size_t>>& adj) const {
    adj.assign(r_ + c_, {});
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t j = 0; j < c_; ++j) {
        if (basic_[cell(i, j)]) {
          adj[i].push_back(r_ + j);
          adj[r_ + j].push_back(i);
        }
      }
    }
  }

  void compute_potentials() {
    std::vector<std::vector<std::size_t>> adj;
    build_adjacency(adj);
    std::vector<bool> visited(r_ + c_, false);
    std::vector<std::size_t> queue;
    queue.push_back(0);
    visited[0] = true;
    u_[0] = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (std::size_t next : adj[node]) {
        if (visited[next]) continue;
        visited[next] = true;
        if (node < r_) {
          v_[next - r_] = cost_.at(node, next - r_) - u_[node];
        } else {
          u_[next] = cost_.at(next, node - r_) - v_[node - r_];
        }
        queue.push_back(next);
      }
    }
  }

  std::size_t find_entering(bool bland) const {
    const double tol = 1e-11;
    std::size_t best = npos;
    double best_reduced = -tol;
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t j = 0; j < c_; ++j) {
        const std::size_t k = cell(i, j);
        if (basic_[k]) continue;
        const double reduced = cost_.data[k] - u_[i] - v_[j];
        if (reduced < best_reduced) {
          best = k;
          if (bland) return best;
          best_reduced = reduced;
        }
      }
    }
    return best;
  }

  // Pivots on the entering cell: the unique basis cycle alternates signs
  // starting with + at the entering cell; the leaving cell is the minimal
  // flow on a - position (least index on ties).
  void pivot(std::size_t enter) {
    const std::size_t ei = enter / c_;
    const std::size_t ej = enter % c_;

    std::vector<std::vector<std::size_t>> adj;
    build_adjacency(adj);
    // Path from row node ei to col node r_ + ej in the basis tree.
    std::vector<std::size_t> parent(r_ + c_, npos);
    std::vector<bool> visited(r_ + c_, false);
    std::vector<std::size_t> queue{ei};
    visited[ei] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      if (node == r_ + ej) break;
      for (std::size_t next : adj[node]) {
        if (visited[next]) continue;
        visited[next] = true;
        parent[next] = node;
        queue.push_back(next);
      }
    }
    if (!visited[r_ + ej]) {
      throw std::runtime_error("exact_ot: basis tree disconnected");
    }

    std::vector<std::size_t> path;  // nodes from col end back to row end
    for (std::size_t node = r_ + ej; node != npos; node = parent[node]) path.push_back(node);
    // Cycle cells in order: entering (+), then alternating along the path.
    std::vector<std::size_t> minus_cells;
    std::vector<std::size_t> plus_cells{enter};
    // path is col(ej) ... row(ei); walk from row end to col end.
    std::reverse(path.begin(), path.end());
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const std::size_t x = path[k];
      const std::size_t y = path[k + 1];
      const std::size_t i = x < r_ ? x : y;
      const std::size_t j = x < r_ ? y - r_ : x - r_;
      if (k % 2 == 0) {
        minus_cells.push_back(cell(i, j));
      } else {
        plus_cells.push_back(cell(i, j));
      }
    }

    // Leaving variable: minimal flow on a minus position, least index on
    // ties (Bland).
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k : minus_cells) theta = std::min(theta, flow_[k]);
    std::size_t leave = npos;
    for (std::size_t k : minus_cells) {
      if (flow_[k] == theta && (leave == npos || k < leave)) leave = k;
    }
    if (leave == npos) throw std::runtime_error("exact_ot: no leaving variable");

    for (std::size_t k : plus_cells) flow_[k] += theta;
    for (std::size_t k : minus_cells) flow_[k] -= theta;
    flow_[leave] = 0.0;
    basic_[leave] = false;
    basic_[enter] = true;
  }

  const CostMatrix& cost_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::size_t r_, c_;
  std::vector<bool> basic_;
  std::vector<double> flow_;
  std::vector<double> u_, v_;
};

}  // namespace detail

// Exact balanced optimal transport via the transportation simplex. Returns
// an optimal basic feasible solution together with the dual objective, so
// optimality can be certified by weak duality.
inline TransportPlan exact_ot(const CostMatrix& cost, const std::vector<double>& a,
                              const std::vector<double>& b) {
  detail::check_marginals(cost, a, b);

  // Drop zero-weight atoms; they only add degeneracy.
  std::vector<std::size_t> rows_kept, cols_kept;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) rows_kept.push_back(i);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] > 0.0) cols_kept.push_back(j);
  }
  if (rows_kept.empty() || cols_kept.empty()) {
    throw std::invalid_argument("exact_ot: all weights are zero");
  }

  CostMatrix reduced(rows_kept.size(), cols_kept.size(), cost.exponent);
  std::vector<double> ra(rows_kept.size()), rb(cols_kept.size());
  for (std::size_t i = 0; i < rows_kept.size(); ++i) {
    ra[i] = a[rows_kept[i]];
    for (std::size_t j = 0; j < cols_kept.size(); ++j) {
      reduced.at(i, j) = cost.at(rows_kept[i], cols_kept[j]);
    }
  }
  double sa = 0.0, sb = 0.0;
  for (std::size_t j = 0; j < cols_kept.size(); ++j) rb[j] = b[cols_kept[j]];
  for (double w : ra) sa += w;
  for (double w : rb) sb += w;
  // Balance exactly so the simplex sees a feasible system.
  for (auto& w : rb) w *= sa / sb;

  detail::TransportationSimplex solver(reduced, ra, rb);
  TransportPlan inner = solver.solve();

  TransportPlan plan;
  plan.rows = cost.rows;
  plan.cols = cost.cols;
  plan.coupling.assign(cost.rows * cost.cols, 0.0);
  for (std::size_t i = 0; i < rows_kept.size(); ++i) {
    for (std::size_t j = 0; j < cols_kept.size(); ++j) {
      plan.at(rows_kept[i], cols_kept[j]) = inner.at(i, j);
    }
  }
  plan.cost = inner.cost;
  plan.dual_objective = inner.dual_objective;
  plan.iterations = inner.iterations;
  detail::fill_residuals(plan, a, b);
  return plan;
}

// Fast path for square costs with uniform marginals: an optimal vertex is a
// permutation, found by the Hungarian algorithm with potentials (Jonker-
// Volgenant style shortest augmenting paths).
inline TransportPlan assignment_ot(const CostMatrix& cost) {
  if (cost.rows != cost.cols || cost.rows == 0) {
    throw std::invalid_argument("assignment_ot: square cost required");
  }
  const std::size_t n = cost.rows;
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internal arrays per the classical formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // match[j] = row assigned to col j
  std::vector<std::size_t> way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  TransportPlan plan;
  plan.rows = n;
  plan.cols = n;
  plan.coupling.assign(n * n, 0.0);
  const double w = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j];
    plan.at(i - 1, j - 1) = w;
    total += w * cost.at(i - 1, j - 1);
  }
  plan.cost = total;
  plan.dual_objective = total;
  const std::vector<double> uniform(n, w);
  detail::fill_residuals(plan, uniform, uniform);
  return plan;
}

}  // namespace dmw
