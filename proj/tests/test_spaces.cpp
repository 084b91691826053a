#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dmw/spaces.hpp"

using namespace dmw;

namespace {

// Degree multiset of the graph whose edges are the pairs at distance 2.
std::vector<int> distance2_degrees(const FiniteMetricMeasureSpace& space) {
  std::vector<int> degrees(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (i != j && space.d(i, j) == 2.0) ++degrees[i];
    }
  }
  std::sort(degrees.begin(), degrees.end());
  return degrees;
}

std::map<double, int> pair_histogram(const FiniteMetricMeasureSpace& space) {
  std::map<double, int> hist;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      ++hist[std::round(space.d(i, j) * 1e9) / 1e9];
    }
  }
  return hist;
}

}  // namespace

TEST_CASE("space validation") {
  CHECK_THROWS_AS(FiniteMetricMeasureSpace({0.0, 1.0, 1.0, 0.0}, {0.6, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteMetricMeasureSpace({0.5, 1.0, 1.0, 0.0}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteMetricMeasureSpace({0.0, 1.0, 2.0, 0.0}, {0.5, 0.5}),
                  std::invalid_argument);
  // Triangle violation: d(0,2)=3 > d(0,1)+d(1,2)=2.
  CHECK_THROWS_AS(FiniteMetricMeasureSpace({0, 1, 3, 1, 0, 1, 3, 1, 0},
                                           {1.0 / 3, 1.0 / 3, 1.0 / 3}),
                  std::invalid_argument);
}

TEST_CASE("path graph on 3 nodes") {
  GraphSpec spec;
  spec.node_count = 3;
  spec.edges = {{0, 1}, {1, 2}};
  const auto space = space_from_graph(spec);
  REQUIRE(space.size() == 3);
  CHECK(space.d(0, 1) == 0.5);
  CHECK(space.d(1, 2) == 0.5);
  CHECK(space.d(0, 2) == 1.0);
  CHECK(space.diameter() == 1.0);
  for (double w : space.weights()) CHECK(w == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("4-cycle graph") {
  GraphSpec spec;
  spec.node_count = 4;
  spec.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const auto space = space_from_graph(spec);
  const auto hist = pair_histogram(space);
  CHECK(space.diameter() == 1.0);
  CHECK(hist.at(0.5) == 4);
  CHECK(hist.at(1.0) == 2);  // the two antipodal pairs
}

TEST_CASE("disconnected graph rejected with a named pair") {
  GraphSpec spec;
  spec.node_count = 4;
  spec.edges = {{0, 1}, {2, 3}};
  CHECK_THROWS_WITH(space_from_graph(spec), Catch::Matchers::ContainsSubstring("disconnected"));
}

TEST_CASE("node budget") {
  GraphSpec spec;
  spec.node_count = 5;
  spec.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  SECTION("budget equal to m is a no-op") {
    spec.node_budget = 5;
    const auto truncated = space_from_graph(spec);
    spec.node_budget.reset();
    const auto full = space_from_graph(spec);
    REQUIRE(truncated.size() == full.size());
    for (std::size_t k = 0; k < full.distance_matrix().size(); ++k) {
      CHECK(truncated.distance_matrix()[k] == full.distance_matrix()[k]);
    }
  }
  SECTION("budget caps the size") {
    spec.node_budget = 3;
    spec.truncation_seed = RngSeed{5};
    const auto space = space_from_graph(spec);
    CHECK(space.size() <= 3);
    CHECK(space.size() >= 2);
    CHECK(space.diameter() == 1.0);
  }
}

TEST_CASE("counterexample spaces") {
  const auto x = space_counterexample_x();
  const auto y = space_counterexample_y();
  REQUIRE(x.size() == 4);
  REQUIRE(y.size() == 4);

  SECTION("pair histograms agree: four at 1, two at 2") {
    for (const auto& space : {x, y}) {
      const auto hist = pair_histogram(space);
      CHECK(hist.at(1.0) == 4);
      CHECK(hist.at(2.0) == 2);
    }
  }
  SECTION("distance-2 degree multisets differ") {
    CHECK(distance2_degrees(x) == std::vector<int>{1, 1, 1, 1});
    CHECK(distance2_degrees(y) == std::vector<int>{0, 1, 1, 2});
  }
}

TEST_CASE("shape clouds") {
  SECTION("unit-circle square, deterministic angles, no noise") {
    ShapeCloudSpec spec;
    spec.sample_count = 4;
    spec.noise_scale = 0.0;
    spec.deterministic_angles = true;
    const auto space = space_from_cloud(spec);
    const auto hist = pair_histogram(space);
    REQUIRE(hist.size() == 2);
    CHECK(hist.begin()->first == Catch::Approx(std::sqrt(2.0)).margin(1e-8));
    CHECK(hist.begin()->second == 4);
    CHECK(hist.rbegin()->first == Catch::Approx(2.0).margin(1e-8));
    CHECK(hist.rbegin()->second == 2);
  }
  SECTION("determinism under a fixed seed") {
    ShapeCloudSpec spec;
    spec.shape = ShapeKind::kEllipse;
    spec.sample_count = 12;
    spec.eccentricity_shift = 0.1;
    spec.seed = RngSeed{99};
    const auto s1 = space_from_cloud(spec);
    const auto s2 = space_from_cloud(spec);
    for (std::size_t k = 0; k < s1.distance_matrix().size(); ++k) {
      CHECK(s1.distance_matrix()[k] == s2.distance_matrix()[k]);
    }
  }
  SECTION("Delta=0 ellipse equals the circle generator") {
    ShapeCloudSpec circle;
    circle.sample_count = 8;
    circle.seed = RngSeed{7};
    ShapeCloudSpec ellipse = circle;
    ellipse.shape = ShapeKind::kEllipse;
    ellipse.eccentricity_shift = 0.0;
    const auto sc = space_from_cloud(circle);
    const auto se = space_from_cloud(ellipse);
    for (std::size_t k = 0; k < sc.distance_matrix().size(); ++k) {
      CHECK(sc.distance_matrix()[k] == se.distance_matrix()[k]);
    }
  }
  SECTION("Delta=1 collapses the minor axis") {
    ShapeCloudSpec spec;
    spec.shape = ShapeKind::kEllipse;
    spec.sample_count = 6;
    spec.eccentricity_shift = 1.0;
    spec.noise_scale = 0.0;
    spec.deterministic_angles = true;
    const auto space = space_from_cloud(spec);
    // All points on the x-axis: distances are |cos t_i - cos t_j|.
    for (std::size_t i = 0; i < 6; ++i) {
      const double xi = std::cos(2.0 * std::numbers::pi * i / 6.0);
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double xj = std::cos(2.0 * std::numbers::pi * j / 6.0);
        CHECK(space.d(i, j) == Catch::Approx(std::abs(xi - xj)).margin(1e-12));
      }
    }
  }
}

TEST_CASE("stochastic block model") {
  SECTION("all-ones probabilities give the complete graph") {
    SbmSpec spec;
    spec.block_sizes = {3, 3};
    spec.within_prob = 1.0;
    spec.between_prob = 1.0;
    const auto space = space_from_sbm(spec);
    REQUIRE(space.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) CHECK(space.d(i, j) == 1.0);
    }
  }
  SECTION("isolated blocks exhaust the retry cap") {
    SbmSpec spec;
    spec.block_sizes = {3, 3};
    spec.within_prob = 1.0;
    spec.between_prob = 0.0;
    spec.retry_cap = 4;
    CHECK_THROWS_AS(space_from_sbm(spec), std::runtime_error);
  }
  SECTION("fixed seed reproduces the space") {
    SbmSpec spec;
    spec.block_sizes = {8, 8};
    spec.within_prob = 0.8;
    spec.between_prob = 0.2;
    spec.seed = RngSeed{17};
    const auto s1 = space_from_sbm(spec);
    const auto s2 = space_from_sbm(spec);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t k = 0; k < s1.distance_matrix().size(); ++k) {
      CHECK(s1.distance_matrix()[k] == s2.distance_matrix()[k]);
    }
    CHECK(s1.diameter() == 1.0);
  }
}
