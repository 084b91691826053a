#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dmw/experiments.hpp"

using namespace dmw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string record_text(const std::vector<ExperimentRecord>& records) {
  std::string text;
  for (const auto& record : records) {
    for (const auto& [name, value] : record.fields) {
      text += name + "=" + detail::field_text(value) + ";";
    }
    text += "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("record serialization") {
  ExperimentRecord record;
  record.add("order", std::size_t{3});
  record.add("value", 0.125);
  record.add("note", std::string("ok"));
  const fs::path dir = fs::temp_directory_path();

  const fs::path csv = dir / "dmw_records_test.csv";
  write_records_csv(csv.string(), {record, record});
  CHECK(slurp(csv) == "order,value,note\n3,0.125,ok\n3,0.125,ok\n");
  fs::remove(csv);

  const fs::path jsn = dir / "dmw_records_test.json";
  write_records_json(jsn.string(), {record});
  const std::string text = slurp(jsn);
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\"order\": 3"));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\"note\": \"ok\""));
  fs::remove(jsn);
}

TEST_CASE("svg chart writer") {
  const fs::path path = fs::temp_directory_path() / "dmw_chart_test.svg";
  write_svg_line_chart(path.string(), "demo", {{"series", {1.0, 2.0, 3.0}, {0.1, 0.4, 0.2}}});
  const std::string text = slurp(path);
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("<svg"));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("polyline"));
  fs::remove(path);
}

TEST_CASE("tradeoff experiment") {
  TradeoffConfig config;
  config.orders = {3};
  config.replicates = 3;
  config.reference_order = 4;
  config.reference_tuples = 200;
  config.reference_directions = 32;
  config.tuples = 64;
  config.directions = 8;
  config.cloud_size = 16;
  SECTION("degenerate one-order sweep") {
    const auto result = run_tradeoff(config, RngSeed{7});
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].order == 3);
    CHECK(result.rows[0].std_gap >= 0.0);
    CHECK(result.records.size() == 1);
  }
  SECTION("fixed seed reproduces the records") {
    const auto r1 = run_tradeoff(config, RngSeed{9});
    const auto r2 = run_tradeoff(config, RngSeed{9});
    CHECK(record_text(r1.records) == record_text(r2.records));
  }
}

TEST_CASE("directions experiment") {
  DirectionsConfig config;
  config.order = 2;
  config.tuples = 64;
  config.block_sizes = {6, 6};
  SECTION("replicate matching the reference budget and stream is exact") {
    config.direction_counts = {32};
    config.reference_directions = 32;
    config.replicates = 1;
    const auto result = run_directions(config, RngSeed{11});
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].fraction_within_20pct == 1.0);
    CHECK(result.rows[0].std_powered == 0.0);
  }
  SECTION("std shrinks with more directions") {
    config.direction_counts = {4, 64};
    config.reference_directions = 128;
    config.replicates = 12;
    const auto result = run_directions(config, RngSeed{13});
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[1].std_powered < result.rows[0].std_powered);
    for (const auto& row : result.rows) {
      CHECK(row.std_powered <= row.concentration_bound);
    }
  }
}

TEST_CASE("scalability experiment smoke") {
  ScalabilityConfig config;
  config.node_counts = {16, 32};
  config.order = 3;
  config.tuples = 128;
  config.directions = 16;
  config.baseline_size_cap = 16;
  config.baseline_tuples = 32;
  config.timing_reps = 1;
  const auto result = run_scalability(config, RngSeed{15});

  CHECK_NOTHROW(result.find("apsp", 16, 0, 0));
  CHECK_NOTHROW(result.find("sliced", 16, 128, 16));
  CHECK_NOTHROW(result.find("sliced", 16, 128, 32));  // doubled-L row
  CHECK_NOTHROW(result.find("sliced", 16, 256, 16));  // doubled-K row
  const auto& skipped = result.find("exact_ot", 32, 32, 0);
  CHECK(skipped.skipped);
  CHECK_THAT(skipped.skip_reason, Catch::Matchers::ContainsSubstring("cap"));
  const auto& ran = result.find("exact_ot", 16, 32, 0);
  CHECK_FALSE(ran.skipped);
  CHECK(ran.value >= 0.0);
}

TEST_CASE("twosample experiment smoke") {
  TwoSampleExperimentConfig config;
  config.deltas = {0.0};
  config.group_sizes = {4};
  config.trials = 2;
  config.cloud_size = 12;
  config.tuples = 32;
  config.directions = 8;
  config.permutations = 19;
  const auto result = run_twosample(config, RngSeed{17});
  REQUIRE(result.cells.size() == 1);
  const auto& cell = result.find(0.0, 4);
  CHECK(cell.trials == 2);
  CHECK(cell.rejection_rate >= 0.0);
  CHECK(cell.rejection_rate <= 1.0);
}

TEST_CASE("counterexample experiment") {
  HierarchyConfig config;
  const auto result = run_counterexample(config, RngSeed{19});
  REQUIRE(result.report.values.size() == 2);
  CHECK(result.report.values[0] <= 1e-9);
  CHECK(result.report.values[1] >= 1e-3);
  CHECK(result.report.monotone);
}

TEST_CASE("kernel export experiment") {
  const fs::path root = fs::temp_directory_path() / "dmw_kernel_fixture";
  fs::remove_all(root);
  fs::create_directories(root / "FIX");
  auto write = [&](const std::string& file, const std::string& content) {
    std::ofstream out(root / "FIX" / ("FIX" + file));
    out << content;
  };
  write("_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n2\n");
  write("_graph_labels.txt", "1\n2\n");
  write("_A.txt",
        "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5, 6\n6, 5\n6, 7\n7, 6\n");

  KernelExportConfig config;
  config.dataset_directory = root.string();
  config.dataset_name = "FIX";
  config.weights = ScaleWeights{{2, 3}, {0.5, 0.5}};
  config.tuples = 32;
  config.directions = 8;

  const fs::path gram_path = root / "gram.txt";
  const auto result = run_kernel_export(config, RngSeed{21}, gram_path.string());
  REQUIRE(result.gram.size == 2);
  CHECK(result.gram.at(0, 0) == 1.0);
  CHECK(result.gram.at(1, 1) == 1.0);
  CHECK(result.labels == std::vector<long>{1, 2});

  const std::string first = slurp(gram_path);
  run_kernel_export(config, RngSeed{21}, gram_path.string());
  CHECK(first == slurp(gram_path));
  CHECK_THAT(first, Catch::Matchers::ContainsSubstring("# scales: 2,3"));
  fs::remove_all(root);
}
