#pragma once

#include <cmath>
#include <vector>

#include "dmw/rng.hpp"
#include "dmw/spaces.hpp"

namespace dmw::testing {

// Random uniform m-point space from Euclidean points in R^3; always a valid
// metric, diameter rescaled to 1.
inline FiniteMetricMeasureSpace random_point_space(std::size_t m, Rng& rng) {
  std::vector<double> xs(m), ys(m), zs(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = rng.next_double();
    ys[i] = rng.next_double();
    zs[i] = rng.next_double();
  }
  std::vector<double> dist(m * m, 0.0);
  double diam = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const double dz = zs[i] - zs[j];
      const double v = std::sqrt(dx * dx + dy * dy + dz * dz);
      dist[i * m + j] = v;
      dist[j * m + i] = v;
      diam = std::max(diam, v);
    }
  }
  if (diam > 0.0) {
    for (auto& v : dist) v /= diam;
  }
  return FiniteMetricMeasureSpace::uniform(std::move(dist), m);
}

}  // namespace dmw::testing
