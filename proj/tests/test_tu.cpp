#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <string>

#include "dmw/tu_io.hpp"

using namespace dmw;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path root;

  explicit Fixture(const std::string& name) {
    root = fs::temp_directory_path() / ("dmw_tu_" + name);
    fs::remove_all(root);
    fs::create_directories(root / "FIX" );
  }
  ~Fixture() { fs::remove_all(root); }

  void write(const std::string& file, const std::string& content) const {
    std::ofstream out(root / "FIX" / ("FIX" + file));
    out << content;
  }
};

}  // namespace

TEST_CASE("tu fixture: triangle + 4-path") {
  Fixture fix("basic");
  // Graph 1: triangle on nodes 1..3. Graph 2: path on nodes 4..7.
  fix.write("_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n2\n");
  fix.write("_graph_labels.txt", "1\n-1\n");
  fix.write("_A.txt",
            "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n"
            "4, 5\n5, 4\n5, 6\n6, 5\n6, 7\n7, 6\n");

  const TuDataset dataset = load_tu_dataset(fix.root.string(), "FIX");
  REQUIRE(dataset.graphs.size() == 2);
  CHECK(dataset.warnings.empty());

  const auto& tri = dataset.graphs[0];
  CHECK(tri.label == 1);
  REQUIRE(tri.space.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) CHECK(tri.space.d(i, j) == 1.0);
  }

  const auto& path = dataset.graphs[1];
  CHECK(path.label == -1);
  REQUIRE(path.space.size() == 4);
  CHECK(path.space.d(0, 3) == 1.0);        // 3 hops / diameter 3
  CHECK(path.space.d(0, 1) == Catch::Approx(1.0 / 3.0));
  CHECK(path.space.d(0, 2) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("tu error cases") {
  SECTION("empty indicator file") {
    Fixture fix("empty");
    fix.write("_graph_indicator.txt", "");
    fix.write("_graph_labels.txt", "1\n");
    fix.write("_A.txt", "");
    CHECK_THROWS_WITH(load_tu_dataset(fix.root.string(), "FIX"),
                      Catch::Matchers::ContainsSubstring("empty indicator"));
  }
  SECTION("missing file") {
    Fixture fix("missing");
    fix.write("_graph_indicator.txt", "1\n");
    fix.write("_graph_labels.txt", "1\n");
    CHECK_THROWS_WITH(load_tu_dataset(fix.root.string(), "FIX"),
                      Catch::Matchers::ContainsSubstring("cannot open"));
  }
  SECTION("label count mismatch") {
    Fixture fix("labels");
    fix.write("_graph_indicator.txt", "1\n1\n2\n2\n");
    fix.write("_graph_labels.txt", "1\n");
    fix.write("_A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n");
    CHECK_THROWS_WITH(load_tu_dataset(fix.root.string(), "FIX"),
                      Catch::Matchers::ContainsSubstring("label count"));
  }
  SECTION("bad integer carries file and line context") {
    Fixture fix("parse");
    fix.write("_graph_indicator.txt", "1\nx\n");
    fix.write("_graph_labels.txt", "1\n");
    fix.write("_A.txt", "1, 2\n2, 1\n");
    CHECK_THROWS_WITH(load_tu_dataset(fix.root.string(), "FIX"),
                      Catch::Matchers::ContainsSubstring("_graph_indicator.txt:2"));
  }
}

TEST_CASE("tu disconnected graph keeps largest component with a warning") {
  Fixture fix("disc");
  // One graph: triangle on 1..3 plus isolated edge 4-5.
  fix.write("_graph_indicator.txt", "1\n1\n1\n1\n1\n");
  fix.write("_graph_labels.txt", "7\n");
  fix.write("_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n");
  const TuDataset dataset = load_tu_dataset(fix.root.string(), "FIX");
  REQUIRE(dataset.graphs.size() == 1);
  CHECK(dataset.graphs[0].space.size() == 3);
  REQUIRE(dataset.warnings.size() == 1);
  CHECK_THAT(dataset.warnings[0], Catch::Matchers::ContainsSubstring("disconnected"));
}

TEST_CASE("tu node budget applies per graph") {
  Fixture fix("budget");
  // One graph: 6-cycle.
  fix.write("_graph_indicator.txt", "1\n1\n1\n1\n1\n1\n");
  fix.write("_graph_labels.txt", "0\n");
  fix.write("_A.txt", "1, 2\n2, 3\n3, 4\n4, 5\n5, 6\n6, 1\n");
  const TuDataset dataset = load_tu_dataset(fix.root.string(), "FIX", 4, RngSeed{11});
  REQUIRE(dataset.graphs.size() == 1);
  CHECK(dataset.graphs[0].space.size() <= 4);
  CHECK(dataset.graphs[0].space.size() >= 2);
}
