#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmw/core.hpp"
#include "dmw/estimators.hpp"
#include "dmw/ot1d.hpp"
#include "dmw/spaces.hpp"

namespace dmw {

struct DissimilarityConfig {
  ScaleWeights weights;
  std::size_t tuple_count = 128;     // K per space per scale
  std::size_t direction_count = 64;  // L shared directions per scale
  DirectionMode mode = DirectionMode::kEuclidean;
};

// Pairwise sliced multi-scale dissimilarities with p = 1 (the PSD guarantee
// only covers p = 1). Directions and per-space tuple samples are SHARED
// across all pairs, so the diagonal is exactly zero and the computed matrix
// is an exact pseudometric on the sample.
inline std::vector<double> msdmw_dissimilarity_matrix(
    const std::vector<FiniteMetricMeasureSpace>& spaces, const DissimilarityConfig& config,
    RngSeed seed, double p = 1.0) {
  if (p != 1.0) {
    throw std::invalid_argument(
        "msdmw_dissimilarity_matrix: p must be 1 (PSD kernel guarantee is p=1 only)");
  }
  config.weights.validate();
  const std::size_t m = spaces.size();
  const std::size_t count = config.tuple_count;
  const std::size_t dirs = config.direction_count;
  std::vector<double> dissimilarity(m * m, 0.0);

  for (std::size_t s = 0; s < config.weights.scales.size(); ++s) {
    const std::size_t n = config.weights.scales[s];
    const double alpha = config.weights.weights[s];

    Rng dir_rng(child_seed(seed, 0, s));
    std::vector<SlicingDirection> directions;
    directions.reserve(dirs);
    for (std::size_t l = 0; l < dirs; ++l) {
      directions.push_back(sample_direction(n, 1.0, config.mode, dir_rng));
    }

    // Sorted projections per space, per direction: sorted[i][l*count + k].
    std::vector<std::vector<double>> sorted(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto law = sample_matrix_law(spaces[i], n, count, child_seed(seed, 1, s));
      sorted[i] = detail::project_law(directions, law);
      for (std::size_t l = 0; l < dirs; ++l) {
        std::sort(sorted[i].begin() + l * count, sorted[i].begin() + (l + 1) * count);
      }
    }

    std::vector<double> a(count), b(count);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double mean = 0.0;
        for (std::size_t l = 0; l < dirs; ++l) {
          double acc = 0.0;
          for (std::size_t k = 0; k < count; ++k) {
            acc += std::abs(sorted[i][l * count + k] - sorted[j][l * count + k]);
          }
          mean += acc / static_cast<double>(count);
        }
        const double value = alpha * mean / static_cast<double>(dirs);
        dissimilarity[i * m + j] += value;
        dissimilarity[j * m + i] += value;
      }
    }
  }
  return dissimilarity;
}

struct GramMatrix {
  std::size_t size = 0;
  std::vector<double> values;  // row-major, symmetric, unit diagonal
  double lambda = 0.0;
  double min_eigenvalue = 0.0;
  bool psd_within_tolerance = true;

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

// Entrywise exponential kernel exp(-lambda * D) with an attached eigenvalue
// check. PSD violations beyond tolerance are flagged, never clipped.
inline GramMatrix gram_from_dissimilarity(const std::vector<double>& dissimilarity,
                                          std::size_t m, double lambda,
                                          double tolerance_scale = 1e-8) {
  if (lambda <= 0.0) throw std::invalid_argument("gram: lambda must be positive");
  if (dissimilarity.size() != m * m) throw std::invalid_argument("gram: matrix must be m x m");
  for (std::size_t i = 0; i < m; ++i) {
    if (dissimilarity[i * m + i] != 0.0) {
      throw std::invalid_argument("gram: dissimilarity diagonal must be zero");
    }
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(dissimilarity[i * m + j] - dissimilarity[j * m + i]) > 1e-12) {
        throw std::invalid_argument("gram: dissimilarity must be symmetric");
      }
    }
  }

  GramMatrix gram;
  gram.size = m;
  gram.lambda = lambda;
  gram.values.resize(m * m);
  Eigen::MatrixXd mat(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::exp(-lambda * dissimilarity[i * m + j]);
      gram.values[i * m + j] = v;
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
  gram.min_eigenvalue = solver.eigenvalues().minCoeff();
  const double max_diag = 1.0;  // exp(0) on the diagonal
  gram.psd_within_tolerance = gram.min_eigenvalue >= -tolerance_scale * max_diag * static_cast<double>(m);
  return gram;
}

// Spectral clipping repair for export: negative eigenvalues set to zero.
inline GramMatrix clip_to_psd(const GramMatrix& gram) {
  const std::size_t m = gram.size;
  Eigen::MatrixXd mat(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gram.at(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
  Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd repaired =
      solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
  GramMatrix out = gram;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.values[i * m + j] = repaired(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  out.min_eigenvalue = std::max(0.0, gram.min_eigenvalue);
  out.psd_within_tolerance = true;
  return out;
}

struct GramExportMetadata {
  std::string dataset;
  std::vector<long> labels;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> scales;
  std::vector<double> scale_weights;
  std::size_t tuple_count = 0;
  std::size_t direction_count = 0;
  std::string direction_mode;
  std::string mmd_estimator = "unbiased";
};

// Text export with a metadata header; row order matches input space order.
inline void write_gram_file(const std::string& path, const GramMatrix& gram,
                            const GramExportMetadata& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("gram export: cannot open " + path);
  auto join = [](const auto& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text += ",";
      char buf[64];
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[0])>>) {
        std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(values[i]));
      } else {
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(values[i]));
      }
      text += buf;
    }
    return text;
  };
  out << "# dmw-gram v1\n";
  out << "# dataset: " << meta.dataset << "\n";
  out << "# size: " << gram.size << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", meta.lambda);
  out << "# lambda: " << buf << "\n";
  out << "# scales: " << join(meta.scales) << "\n";
  out << "# scale_weights: " << join(meta.scale_weights) << "\n";
  out << "# K: " << meta.tuple_count << "\n";
  out << "# L: " << meta.direction_count << "\n";
  out << "# p: 1\n";
  out << "# direction_mode: " << meta.direction_mode << "\n";
  out << "# seed: " << meta.seed << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", gram.min_eigenvalue);
  out << "# min_eigenvalue: " << buf << "\n";
  out << "# labels: " << join(meta.labels) << "\n";
  for (std::size_t i = 0; i < gram.size; ++i) {
    std::string row;
    for (std::size_t j = 0; j < gram.size; ++j) {
      if (j) row += " ";
      std::snprintf(buf, sizeof(buf), "%.12g", gram.at(i, j));
      row += buf;
    }
    out << row << "\n";
  }
}

}  // namespace dmw
