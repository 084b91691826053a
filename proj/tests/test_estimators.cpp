#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "dmw/estimators.hpp"
#include "dmw/matrix_law.hpp"
#include "dmw/spaces.hpp"
#include "helpers.hpp"

using namespace dmw;

// Regression constant: exact order-3 DMW (p=1) between the two four-point
// counterexample spaces, produced by the enumeration + simplex pipeline and
// frozen to 12 significant digits. See test "counterexample order 3".
static constexpr double kCounterexampleOrder3 = 0.0625;

TEST_CASE("empirical_dmw self-distance is zero") {
  const auto law = enumerate_matrix_law(space_counterexample_x(), 2);
  CHECK(empirical_dmw(law, law, 1.0).value <= 1e-9);
  CHECK(empirical_dmw(law, law, 2.0).value <= 1e-9);
}

TEST_CASE("counterexample order 2 vanishes") {
  const auto est = exact_dmw(space_counterexample_x(), space_counterexample_y(), 2, 1.0);
  CHECK(est.value <= 1e-9);
  CHECK(est.mode == DmwMode::kExactEnumerated);
}

TEST_CASE("counterexample order 3") {
  const auto est = exact_dmw(space_counterexample_x(), space_counterexample_y(), 3, 1.0);
  CHECK(est.value >= 1e-3);
  CHECK(est.value == Catch::Approx(kCounterexampleOrder3).margin(1e-9));
}

TEST_CASE("sinkhorn-backed empirical DMW approaches the exact value") {
  const auto law_x = enumerate_matrix_law(space_counterexample_x(), 3);
  const auto law_y = enumerate_matrix_law(space_counterexample_y(), 3);
  const double exact_value = empirical_dmw(law_x, law_y, 1.0).value;
  OtSolverConfig solver;
  solver.kind = OtSolverKind::kSinkhorn;
  solver.sinkhorn.epsilon = 1e-3;
  solver.sinkhorn.max_iters = 1000000;
  const auto est = empirical_dmw(law_x, law_y, 1.0, solver);
  CHECK(est.sinkhorn_report.converged);
  CHECK(est.value >= exact_value - 1e-9);
  const std::size_t k = std::max(law_x.atom_count, law_y.atom_count);
  CHECK(est.value - exact_value <= 2.0 * 1e-3 * std::log(static_cast<double>(k)) + 1e-9);
}

TEST_CASE("sliced self-comparison with shared tuple stream is exactly zero") {
  const auto space = space_counterexample_x();
  SlicedConfig config;
  config.order = 3;
  config.tuple_count = 64;
  config.direction_count = 16;
  SlicedSeeds seeds = derive_sliced_seeds(RngSeed{5});
  seeds.tuples_y = seeds.tuples_x;
  CHECK(sliced_dmw(space, space, config, seeds).value == 0.0);
}

TEST_CASE("sliced with L=1 equals w1d on the projected atoms") {
  const auto space_x = space_counterexample_x();
  const auto space_y = space_counterexample_y();
  for (double p : {1.0, 2.0}) {
    SlicedConfig config;
    config.order = 3;
    config.tuple_count = 50;
    config.direction_count = 1;
    config.p = p;
    const SlicedSeeds seeds = derive_sliced_seeds(RngSeed{8});
    const double sliced = sliced_dmw(space_x, space_y, config, seeds).value;

    Rng dir_rng(seeds.directions);
    const auto dir = sample_direction(3, p, config.mode, dir_rng);
    const auto law_x = sample_matrix_law(space_x, 3, 50, seeds.tuples_x);
    const auto law_y = sample_matrix_law(space_y, 3, 50, seeds.tuples_y);
    DiscreteMeasure1D mx, my;
    for (std::size_t k = 0; k < 50; ++k) {
      mx.values.push_back(project(dir, law_x.atom(k)));
      my.values.push_back(project(dir, law_y.atom(k)));
    }
    CHECK(sliced == Catch::Approx(std::pow(w1d_pth_power(mx, my, p), 1.0 / p)).epsilon(1e-12));
  }
}

TEST_CASE("streaming layout is bit-identical to the in-memory layout") {
  const auto space_x = space_counterexample_x();
  const auto space_y = space_counterexample_y();
  SlicedConfig config;
  config.order = 4;
  config.tuple_count = 200;
  config.direction_count = 32;
  const auto in_memory = sliced_dmw(space_x, space_y, config, RngSeed{13});
  config.streaming = true;
  const auto streaming = sliced_dmw(space_x, space_y, config, RngSeed{13});
  CHECK(in_memory.value == streaming.value);
}

TEST_CASE("sliced determinism") {
  Rng rng(RngSeed{17});
  const auto space_x = testing::random_point_space(5, rng);
  const auto space_y = testing::random_point_space(5, rng);
  SlicedConfig config;
  config.order = 3;
  const double v1 = sliced_dmw(space_x, space_y, config, RngSeed{21}).value;
  const double v2 = sliced_dmw(space_x, space_y, config, RngSeed{21}).value;
  CHECK(v1 == v2);
}

TEST_CASE("dual-mode per-direction W_p never exceeds the exact DMW") {
  Rng rng(RngSeed{19});
  for (int pair = 0; pair < 3; ++pair) {
    const auto space_x = testing::random_point_space(4, rng);
    const auto space_y = testing::random_point_space(4, rng);
    const auto law_x = enumerate_matrix_law(space_x, 2);
    const auto law_y = enumerate_matrix_law(space_y, 2);
    const double exact_value = empirical_dmw(law_x, law_y, 1.0).value;

    DiscreteMeasure1D mx, my;
    mx.weights = law_x.weights;
    my.weights = law_y.weights;
    mx.values.resize(law_x.atom_count);
    my.values.resize(law_y.atom_count);
    for (int trial = 0; trial < 100; ++trial) {
      const auto dir = sample_direction(2, 1.0, DirectionMode::kDual, rng);
      for (std::size_t k = 0; k < law_x.atom_count; ++k) {
        mx.values[k] = project(dir, law_x.atom(k));
      }
      for (std::size_t k = 0; k < law_y.atom_count; ++k) {
        my.values[k] = project(dir, law_y.atom(k));
      }
      CHECK(w1d_pth_power(mx, my, 1.0) <= exact_value + 1e-9);
    }
  }
}

TEST_CASE("softmin weights") {
  SECTION("equal bounds give uniform weights") {
    const auto w = softmin_weights({2, 3, 4}, {0.7, 0.7, 0.7}, 0.5);
    for (double v : w.weights) CHECK(v == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SECTION("tau to zero concentrates on the argmin") {
    const auto w = softmin_weights({2, 3, 4}, {0.5, 0.1, 0.9}, 1e-9);
    CHECK(w.weights[1] == Catch::Approx(1.0).margin(1e-9));
    CHECK(w.weights[0] <= 1e-9);
    CHECK(w.weights[2] <= 1e-9);
  }
  SECTION("hand-evaluated two-scale case") {
    const auto w = softmin_weights({2, 3}, {1.0, 2.0}, 1.0);
    const double e1 = std::exp(-1.0);
    CHECK(w.weights[0] == Catch::Approx(1.0 / (1.0 + e1)).epsilon(1e-12));
    CHECK(w.weights[1] == Catch::Approx(e1 / (1.0 + e1)).epsilon(1e-12));
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(softmin_weights({2}, {1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(softmin_weights({2, 3}, {1.0}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("multiscale estimator") {
  const auto space_x = space_counterexample_x();
  const auto space_y = space_counterexample_y();
  SECTION("single scale with weight 1 equals the single-scale estimate") {
    MultiScaleConfig config;
    config.weights = ScaleWeights{{3}, {1.0}};
    config.sliced_template.tuple_count = 64;
    config.sliced_template.direction_count = 16;
    const auto multi = multiscale_dmw(space_x, space_y, config, RngSeed{23});
    SlicedConfig single = config.sliced_template;
    single.order = 3;
    const auto direct = sliced_dmw(space_x, space_y, single, child_seed(RngSeed{23}, 0));
    CHECK(multi.value == direct.value);
  }
  SECTION("linear-combination identity") {
    MultiScaleConfig config;
    config.weights = ScaleWeights{{2, 3, 4}, {0.2, 0.5, 0.3}};
    config.sliced_template.tuple_count = 32;
    config.sliced_template.direction_count = 8;
    const auto multi = multiscale_dmw(space_x, space_y, config, RngSeed{29});
    REQUIRE(multi.per_scale.size() == 3);
    double acc = 0.0;
    for (std::size_t s = 0; s < 3; ++s) acc += config.weights.weights[s] * multi.per_scale[s];
    CHECK(multi.value == Catch::Approx(acc).margin(1e-12));
  }
  SECTION("exact mode self-comparison is zero") {
    MultiScaleConfig config;
    config.weights = ScaleWeights{{2, 3}, {0.5, 0.5}};
    config.sliced = false;
    const auto multi = multiscale_dmw(space_x, space_x, config, RngSeed{31});
    CHECK(multi.value <= 1e-9);
  }
  SECTION("weight validation") {
    MultiScaleConfig config;
    config.weights = ScaleWeights{{2, 2}, {0.5, 0.5}};
    CHECK_THROWS_AS(multiscale_dmw(space_x, space_y, config, RngSeed{1}),
                    std::invalid_argument);
  }
}

TEST_CASE("hierarchy check") {
  SECTION("counterexample pair at orders 2, 3") {
    const auto report =
        hierarchy_check(space_counterexample_x(), space_counterexample_y(), {2, 3}, 1.0);
    REQUIRE(report.values.size() == 2);
    CHECK(report.values[0] <= 1e-9);
    CHECK(report.values[1] >= 1e-3);
    CHECK(report.monotone);
  }
  SECTION("identical spaces give all zeros") {
    const auto report = hierarchy_check(space_counterexample_x(), space_counterexample_x(),
                                        {2, 3, 4}, 1.0);
    for (double v : report.values) CHECK(v <= 1e-9);
    CHECK(report.monotone);
  }
  SECTION("random 4-point pairs are monotone over orders 2, 3, 4") {
    Rng rng(RngSeed{37});
    for (int trial = 0; trial < 5; ++trial) {
      const auto space_x = testing::random_point_space(4, rng);
      const auto space_y = testing::random_point_space(4, rng);
      CHECK(hierarchy_check(space_x, space_y, {2, 3, 4}, 1.0).monotone);
    }
  }
}

TEST_CASE("empirical error decomposition on a tiny pair") {
  Rng rng(RngSeed{41});
  const auto space_x = testing::random_point_space(3, rng);
  const auto space_y = testing::random_point_space(3, rng);
  const auto exact_x = enumerate_matrix_law(space_x, 2);
  const auto exact_y = enumerate_matrix_law(space_y, 2);
  const double exact_value = empirical_dmw(exact_x, exact_y, 1.0).value;
  for (int trial = 0; trial < 5; ++trial) {
    const auto hat_x = sample_matrix_law(space_x, 2, 150, child_seed(RngSeed{43}, trial, 0));
    const auto hat_y = sample_matrix_law(space_y, 2, 150, child_seed(RngSeed{43}, trial, 1));
    const double empirical = empirical_dmw(hat_x, hat_y, 1.0).value;
    const double err_x = empirical_dmw(hat_x, exact_x, 1.0).value;
    const double err_y = empirical_dmw(hat_y, exact_y, 1.0).value;
    CHECK(std::abs(empirical - exact_value) <= err_x + err_y + 1e-12);
  }
}
