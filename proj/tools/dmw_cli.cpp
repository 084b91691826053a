// Command-line experiment drivers for the DMW library.
//
// One subcommand per experiment; every run writes a deterministic
// records.{csv,json}, a config echo with an environment stamp, a chart where
// one makes sense, and (separately) wall-clock timings, which are the only
// non-reproducible output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dmw/dmw.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "JSON config file");
  cmd->add_option("--out", options.out_dir, "output directory");
  cmd->add_option("--seed", options.seed, "master RNG seed");
  cmd->add_option("--threads", options.threads, "maximum worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", options.format, "record format")
      ->check(CLI::IsMember({"csv", "json"}));
}

json load_config(const CommonOptions& options) {
  if (options.config_path.empty()) return json::object();
  std::ifstream in(options.config_path);
  if (!in) throw std::runtime_error("cannot open config file " + options.config_path);
  json config;
  in >> config;
  if (!config.is_object()) throw std::runtime_error("config root must be a JSON object");
  return config;
}

template <typename T>
T get_or(const json& config, const std::string& key, T fallback) {
  if (!config.contains(key)) return fallback;
  return config.at(key).get<T>();
}

dmw::DirectionMode parse_mode(const json& config, const std::string& fallback) {
  const std::string mode = get_or<std::string>(config, "direction_mode", fallback);
  if (mode == "dual") return dmw::DirectionMode::kDual;
  if (mode == "euclidean") return dmw::DirectionMode::kEuclidean;
  throw std::runtime_error("direction_mode must be 'dual' or 'euclidean'");
}

dmw::ScaleWeights parse_weights(const json& config, const dmw::ScaleWeights& fallback) {
  if (!config.contains("scales")) return fallback;
  dmw::ScaleWeights weights;
  weights.scales = config.at("scales").get<std::vector<std::size_t>>();
  if (config.contains("scale_weights")) {
    weights.weights = config.at("scale_weights").get<std::vector<double>>();
  } else {
    weights.weights.assign(weights.scales.size(), 1.0 / weights.scales.size());
  }
  weights.validate();
  return weights;
}

void write_config_echo(const fs::path& dir, const std::string& experiment,
                       const CommonOptions& options, const json& config) {
  json echo;
  echo["experiment"] = experiment;
  echo["seed"] = options.seed;
  echo["threads"] = options.threads;
  echo["format"] = options.format;
  echo["config"] = config;
  echo["environment"] = {
      {"compiler", std::string(__VERSION__)},
      {"float_bits", 64},
      {"library", "dmw"},
  };
  std::ofstream out(dir / "config_echo.json");
  out << echo.dump(2) << "\n";
}

void write_records(const fs::path& dir, const CommonOptions& options,
                   const std::vector<dmw::ExperimentRecord>& records) {
  if (options.format == "json") {
    dmw::write_records_json((dir / "records.json").string(), records);
  } else {
    dmw::write_records_csv((dir / "records.csv").string(), records);
  }
}

void write_timings(const fs::path& dir, const std::vector<dmw::ExperimentRecord>& timings) {
  dmw::write_records_csv((dir / "timings.csv").string(), timings);
}

int run_tradeoff_cmd(const CommonOptions& options) {
  const json config = load_config(options);
  dmw::TradeoffConfig tradeoff;
  tradeoff.orders = get_or(config, "orders", tradeoff.orders);
  tradeoff.reference_order = get_or(config, "reference_order", tradeoff.reference_order);
  tradeoff.reference_tuples = get_or(config, "reference_tuples", tradeoff.reference_tuples);
  tradeoff.reference_directions =
      get_or(config, "reference_directions", tradeoff.reference_directions);
  tradeoff.tuples = get_or(config, "tuples", tradeoff.tuples);
  tradeoff.directions = get_or(config, "directions", tradeoff.directions);
  tradeoff.replicates = get_or(config, "replicates", tradeoff.replicates);
  tradeoff.p = get_or(config, "p", tradeoff.p);
  tradeoff.mode = parse_mode(config, "euclidean");
  tradeoff.cloud_size = get_or(config, "cloud_size", tradeoff.cloud_size);
  tradeoff.eccentricity_shift =
      get_or(config, "eccentricity_shift", tradeoff.eccentricity_shift);
  tradeoff.noise_scale = get_or(config, "noise_scale", tradeoff.noise_scale);

  const auto result = dmw::run_tradeoff(tradeoff, dmw::RngSeed{options.seed});
  const fs::path dir(options.out_dir);
  write_config_echo(dir, "tradeoff", options, config);
  write_records(dir, options, result.records);
  write_timings(dir, result.timings);
  dmw::ChartSeries gap{"mean_gap", {}, {}};
  for (const auto& row : result.rows) {
    gap.xs.push_back(static_cast<double>(row.order));
    gap.ys.push_back(row.mean_gap);
  }
  dmw::write_svg_line_chart((dir / "chart.svg").string(),
                            "Reference gap vs order", {gap});
  return 0;
}

int run_directions_cmd(const CommonOptions& options) {
  const json config = load_config(options);
  dmw::DirectionsConfig directions;
  directions.direction_counts =
      get_or(config, "direction_counts", directions.direction_counts);
  directions.reference_directions =
      get_or(config, "reference_directions", directions.reference_directions);
  directions.order = get_or(config, "order", directions.order);
  directions.tuples = get_or(config, "tuples", directions.tuples);
  directions.replicates = get_or(config, "replicates", directions.replicates);
  directions.p = get_or(config, "p", directions.p);
  directions.mode = parse_mode(config, "dual");

  const auto result = dmw::run_directions(directions, dmw::RngSeed{options.seed});
  const fs::path dir(options.out_dir);
  write_config_echo(dir, "directions", options, config);
  write_records(dir, options, result.records);
  write_timings(dir, result.timings);
  dmw::ChartSeries fraction{"fraction_within_20pct", {}, {}};
  dmw::ChartSeries sd{"std_powered", {}, {}};
  for (const auto& row : result.rows) {
    fraction.xs.push_back(static_cast<double>(row.directions));
    fraction.ys.push_back(row.fraction_within_20pct);
    sd.xs.push_back(static_cast<double>(row.directions));
    sd.ys.push_back(row.std_powered);
  }
  dmw::write_svg_line_chart((dir / "chart.svg").string(),
                            "Direction budget sweep", {fraction, sd});
  return 0;
}

int run_scalability_cmd(const CommonOptions& options) {
  const json config = load_config(options);
  dmw::ScalabilityConfig scalability;
  scalability.node_counts = get_or(config, "node_counts", scalability.node_counts);
  scalability.order = get_or(config, "order", scalability.order);
  scalability.tuples = get_or(config, "tuples", scalability.tuples);
  scalability.directions = get_or(config, "directions", scalability.directions);
  scalability.p = get_or(config, "p", scalability.p);
  scalability.baseline_size_cap =
      get_or(config, "baseline_size_cap", scalability.baseline_size_cap);
  scalability.baseline_tuples = get_or(config, "baseline_tuples", scalability.baseline_tuples);
  scalability.wall_clock_cap_seconds =
      get_or(config, "wall_clock_cap_seconds", scalability.wall_clock_cap_seconds);
  scalability.timing_reps = get_or(config, "timing_reps", scalability.timing_reps);

  const auto result = dmw::run_scalability(scalability, dmw::RngSeed{options.seed});
  const fs::path dir(options.out_dir);
  write_config_echo(dir, "scalability", options, config);
  write_records(dir, options, result.records);
  write_timings(dir, result.timings);
  dmw::ChartSeries sliced{"sliced_seconds", {}, {}};
  for (const auto& row : result.rows) {
    if (row.phase == "sliced" && row.tuples == scalability.tuples &&
        row.directions == scalability.directions) {
      sliced.xs.push_back(static_cast<double>(row.node_count));
      sliced.ys.push_back(row.seconds);
    }
  }
  // Plots wall-clock data, so it lives with timings.csv outside the
  // byte-identical rerun guarantee.
  dmw::write_svg_line_chart((dir / "timings_chart.svg").string(),
                            "Sliced phase time vs node count", {sliced});
  return 0;
}

int run_twosample_cmd(const CommonOptions& options) {
  const json config = load_config(options);
  dmw::TwoSampleExperimentConfig twosample;
  twosample.deltas = get_or(config, "deltas", twosample.deltas);
  twosample.group_sizes = get_or(config, "group_sizes", twosample.group_sizes);
  twosample.trials = get_or(config, "trials", twosample.trials);
  twosample.cloud_size = get_or(config, "cloud_size", twosample.cloud_size);
  twosample.noise_scale = get_or(config, "noise_scale", twosample.noise_scale);
  twosample.weights = parse_weights(config, twosample.weights);
  twosample.tuples = get_or(config, "tuples", twosample.tuples);
  twosample.directions = get_or(config, "directions", twosample.directions);
  twosample.mode = parse_mode(config, "euclidean");
  twosample.lambda = get_or(config, "lambda", twosample.lambda);
  twosample.permutations = get_or(config, "permutations", twosample.permutations);
  twosample.alpha = get_or(config, "alpha", twosample.alpha);

  const auto result = dmw::run_twosample(twosample, dmw::RngSeed{options.seed});
  const fs::path dir(options.out_dir);
  write_config_echo(dir, "twosample", options, config);
  write_records(dir, options, result.records);
  write_timings(dir, result.timings);
  std::vector<dmw::ChartSeries> series;
  for (std::size_t g : twosample.group_sizes) {
    dmw::ChartSeries s{"group=" + std::to_string(g), {}, {}};
    for (const auto& cell : result.cells) {
      if (cell.group_size == g) {
        s.xs.push_back(cell.delta);
        s.ys.push_back(cell.rejection_rate);
      }
    }
    series.push_back(std::move(s));
  }
  dmw::write_svg_line_chart((dir / "chart.svg").string(),
                            "Rejection rate vs eccentricity shift", series);
  return 0;
}

int run_hierarchy_cmd(const CommonOptions& options, bool counterexample_pair) {
  const json config = load_config(options);
  dmw::HierarchyConfig hierarchy;
  hierarchy.orders = get_or(config, "orders", hierarchy.orders);
  hierarchy.p = get_or(config, "p", hierarchy.p);
  hierarchy.enumeration_budget =
      get_or(config, "enumeration_budget", hierarchy.enumeration_budget);

  dmw::HierarchyResult result;
  if (counterexample_pair || get_or<std::string>(config, "pair", "counterexample") ==
                                 "counterexample") {
    result = dmw::run_counterexample(hierarchy, dmw::RngSeed{options.seed});
  } else {
    // Tiny circle/ellipse pair; enumeration budgets force small clouds.
    dmw::ShapeCloudSpec cloud;
    cloud.sample_count = get_or<std::size_t>(config, "cloud_size", 6);
    cloud.noise_scale = get_or(config, "noise_scale", 0.05);
    cloud.seed = dmw::child_seed(dmw::RngSeed{options.seed}, 100);
    const auto space_x = dmw::space_from_cloud(cloud);
    cloud.shape = dmw::ShapeKind::kEllipse;
    cloud.eccentricity_shift = get_or(config, "eccentricity_shift", 0.3);
    cloud.seed = dmw::child_seed(dmw::RngSeed{options.seed}, 101);
    const auto space_y = dmw::space_from_cloud(cloud);
    result = dmw::run_hierarchy(space_x, space_y, hierarchy, dmw::RngSeed{options.seed});
  }

  const fs::path dir(options.out_dir);
  write_config_echo(dir, counterexample_pair ? "counterexample" : "hierarchy", options, config);
  write_records(dir, options, result.records);
  return 0;
}

int run_kernel_export_cmd(const CommonOptions& options) {
  const json config = load_config(options);
  dmw::KernelExportConfig kernel;
  kernel.dataset_directory = get_or<std::string>(config, "dataset_directory", "");
  kernel.dataset_name = get_or<std::string>(config, "dataset_name", "");
  if (kernel.dataset_directory.empty() || kernel.dataset_name.empty()) {
    throw std::runtime_error("kernel-export requires dataset_directory and dataset_name");
  }
  if (config.contains("node_budget")) {
    kernel.node_budget = config.at("node_budget").get<std::size_t>();
  }
  kernel.weights = parse_weights(config, kernel.weights);
  kernel.tuples = get_or(config, "tuples", kernel.tuples);
  kernel.directions = get_or(config, "directions", kernel.directions);
  kernel.mode = parse_mode(config, "euclidean");
  kernel.lambda = get_or(config, "lambda", kernel.lambda);
  kernel.clip = get_or(config, "clip_to_psd", kernel.clip);

  const fs::path dir(options.out_dir);
  const fs::path gram_path = dir / (kernel.dataset_name + "_gram.txt");
  const auto result =
      dmw::run_kernel_export(kernel, dmw::RngSeed{options.seed}, gram_path.string());
  write_config_echo(dir, "kernel-export", options, config);
  write_records(dir, options, result.records);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-Matrix Wasserstein experiment drivers"};
  app.require_subcommand(1);

  CommonOptions options;
  std::string active;
  for (const char* name : {"tradeoff", "directions", "scalability", "twosample", "hierarchy",
                           "counterexample", "kernel-export"}) {
    auto* cmd = app.add_subcommand(name, name);
    add_common(cmd, options);
    cmd->callback([&active, name]() { active = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(options.out_dir);
    if (active == "tradeoff") return run_tradeoff_cmd(options);
    if (active == "directions") return run_directions_cmd(options);
    if (active == "scalability") return run_scalability_cmd(options);
    if (active == "twosample") return run_twosample_cmd(options);
    if (active == "hierarchy") return run_hierarchy_cmd(options, false);
    if (active == "counterexample") return run_hierarchy_cmd(options, true);
    if (active == "kernel-export") return run_kernel_export_cmd(options);
    throw std::runtime_error("unknown subcommand");
  } catch (const std::exception& error) {
    json err;
    err["error"] = error.what();
    err["experiment"] = active;
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
