#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dmw/estimators.hpp"
#include "dmw/gw.hpp"
#include "dmw/kernels.hpp"
#include "dmw/spaces.hpp"
#include "dmw/tu_io.hpp"
#include "dmw/twosample.hpp"

namespace dmw {

// ---------------------------------------------------------------------------
// Result records and serialization.
//
// Statistic records are reproducible byte-for-byte from (config, seed) and go
// to records.csv / records.json. Wall-clock measurements can never be
// bit-reproducible, so they are written to a separate timings.csv that is
// excluded from the determinism contract.
// ---------------------------------------------------------------------------

using FieldValue = std::variant<long long, double, std::string>;

struct ExperimentRecord {
  std::vector<std::pair<std::string, FieldValue>> fields;

  void add(std::string name, long long value) { fields.emplace_back(std::move(name), value); }
  void add(std::string name, std::size_t value) {
    fields.emplace_back(std::move(name), static_cast<long long>(value));
  }
  void add(std::string name, double value) { fields.emplace_back(std::move(name), value); }
  void add(std::string name, std::string value) {
    fields.emplace_back(std::move(name), std::move(value));
  }
};

namespace detail {

inline std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

inline std::string field_text(const FieldValue& value) {
  if (std::holds_alternative<long long>(value)) {
    return std::to_string(std::get<long long>(value));
  }
  if (std::holds_alternative<double>(value)) return format_real(std::get<double>(value));
  return std::get<std::string>(value);
}

inline std::string json_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("experiments: cannot open output file " + path);
  return out;
}

class PhaseTimer {
 public:
  PhaseTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline void write_records_csv(const std::string& path,
                              const std::vector<ExperimentRecord>& records) {
  auto out = detail::open_out(path);
  if (records.empty()) {
    out << "\n";
    return;
  }
  const auto& header = records.front().fields;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out << ",";
    out << header[c].first;
  }
  out << "\n";
  for (const auto& record : records) {
    if (record.fields.size() != header.size()) {
      throw std::runtime_error("experiments: ragged record set");
    }
    for (std::size_t c = 0; c < record.fields.size(); ++c) {
      if (record.fields[c].first != header[c].first) {
        throw std::runtime_error("experiments: record field order mismatch");
      }
      if (c) out << ",";
      out << detail::field_text(record.fields[c].second);
    }
    out << "\n";
  }
}

inline void write_records_json(const std::string& path,
                               const std::vector<ExperimentRecord>& records) {
  auto out = detail::open_out(path);
  out << "[\n";
  for (std::size_t r = 0; r < records.size(); ++r) {
    out << "  {";
    for (std::size_t c = 0; c < records[r].fields.size(); ++c) {
      if (c) out << ", ";
      const auto& [name, value] = records[r].fields[c];
      out << "\"" << detail::json_escape(name) << "\": ";
      if (std::holds_alternative<std::string>(value)) {
        out << "\"" << detail::json_escape(std::get<std::string>(value)) << "\"";
      } else {
        out << detail::field_text(value);
      }
    }
    out << "}" << (r + 1 < records.size() ? "," : "") << "\n";
  }
  out << "]\n";
}

// Minimal self-contained SVG line chart: one polyline per series over shared
// x values, with linear axes fitted to the data.
struct ChartSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

inline void write_svg_line_chart(const std::string& path, const std::string& title,
                                 const std::vector<ChartSeries>& series) {
  auto out = detail::open_out(path);
  const double width = 640.0, height = 420.0, margin = 60.0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.xs.size(); ++k) {
      if (first) {
        xmin = xmax = s.xs[k];
        ymin = ymax = s.ys[k];
        first = false;
      }
      xmin = std::min(xmin, s.xs[k]);
      xmax = std::max(xmax, s.xs[k]);
      ymin = std::min(ymin, s.ys[k]);
      ymax = std::max(ymax, s.ys[k]);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2.0 * margin);
  };
  auto py = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2.0 * margin);
  };
  const char* palette[] = {"#1f6fb2", "#c44e52", "#55a868", "#8172b2", "#ccb974"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::json_escape(title) << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 18
      << "\" font-size=\"10\" text-anchor=\"middle\">" << detail::format_real(xmin)
      << "</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
      << "\" font-size=\"10\" text-anchor=\"middle\">" << detail::format_real(xmax)
      << "</text>\n";
  out << "<text x=\"" << margin - 6 << "\" y=\"" << height - margin
      << "\" font-size=\"10\" text-anchor=\"end\">" << detail::format_real(ymin) << "</text>\n";
  out << "<text x=\"" << margin - 6 << "\" y=\"" << margin
      << "\" font-size=\"10\" text-anchor=\"end\">" << detail::format_real(ymax) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].xs.size(); ++k) {
      if (k) out << " ";
      out << detail::format_real(px(series[s].xs[k])) << ","
          << detail::format_real(py(series[s].ys[k]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16.0 * s
        << "\" font-size=\"10\" fill=\"" << color << "\">" << detail::json_escape(series[s].name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Tradeoff experiment: per-order low-budget sliced estimates against one
// high-order, high-budget reference on a circle/ellipse pair.
// ---------------------------------------------------------------------------

struct TradeoffConfig {
  std::vector<std::size_t> orders{2, 3, 4, 6, 8, 12};
  std::size_t reference_order = 12;
  std::size_t reference_tuples = 4000;
  std::size_t reference_directions = 512;
  std::size_t tuples = 256;
  std::size_t directions = 64;
  std::size_t replicates = 8;
  double p = 1.0;
  DirectionMode mode = DirectionMode::kEuclidean;
  std::size_t cloud_size = 48;
  double eccentricity_shift = 0.3;
  double noise_scale = 0.05;
};

struct TradeoffRow {
  std::size_t order = 0;
  double mean_gap = 0.0;
  double std_gap = 0.0;
  double mean_value = 0.0;
};

struct TradeoffResult {
  double reference_value = 0.0;
  std::vector<TradeoffRow> rows;
  std::vector<ExperimentRecord> records;
  std::vector<ExperimentRecord> timings;
};

namespace detail {

inline void mean_std(const std::vector<double>& values, double& mean, double& sd) {
  mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  sd = values.size() > 1 ? std::sqrt(acc / static_cast<double>(values.size() - 1)) : 0.0;
}

inline FiniteMetricMeasureSpace tradeoff_circle(const TradeoffConfig& config, RngSeed seed) {
  ShapeCloudSpec spec;
  spec.shape = ShapeKind::kCircle;
  spec.sample_count = config.cloud_size;
  spec.noise_scale = config.noise_scale;
  spec.seed = seed;
  return space_from_cloud(spec);
}

inline FiniteMetricMeasureSpace tradeoff_ellipse(const TradeoffConfig& config, RngSeed seed) {
  ShapeCloudSpec spec;
  spec.shape = ShapeKind::kEllipse;
  spec.eccentricity_shift = config.eccentricity_shift;
  spec.sample_count = config.cloud_size;
  spec.noise_scale = config.noise_scale;
  spec.seed = seed;
  return space_from_cloud(spec);
}

}  // namespace detail

inline TradeoffResult run_tradeoff(const TradeoffConfig& config, RngSeed seed) {
  if (config.orders.empty() || config.replicates == 0) {
    throw std::invalid_argument("tradeoff: orders and replicates must be nonempty");
  }
  TradeoffResult result;
  const auto space_x = detail::tradeoff_circle(config, child_seed(seed, 100));
  const auto space_y = detail::tradeoff_ellipse(config, child_seed(seed, 101));

  SlicedConfig reference;
  reference.order = config.reference_order;
  reference.tuple_count = config.reference_tuples;
  reference.direction_count = config.reference_directions;
  reference.p = config.p;
  reference.mode = config.mode;
  detail::PhaseTimer ref_timer;
  result.reference_value = sliced_dmw(space_x, space_y, reference, child_seed(seed, 0)).value;
  {
    ExperimentRecord timing;
    timing.add("phase", std::string("reference"));
    timing.add("order", config.reference_order);
    timing.add("seconds", ref_timer.seconds());
    result.timings.push_back(timing);
  }

  std::vector<std::size_t> orders = config.orders;
  std::sort(orders.begin(), orders.end());
  for (std::size_t n : orders) {
    SlicedConfig low;
    low.order = n;
    low.tuple_count = config.tuples;
    low.direction_count = config.directions;
    low.p = config.p;
    low.mode = config.mode;
    std::vector<double> gaps, values;
    detail::PhaseTimer timer;
    for (std::size_t r = 0; r < config.replicates; ++r) {
      const double value = sliced_dmw(space_x, space_y, low, child_seed(seed, 1, n, r)).value;
      values.push_back(value);
      gaps.push_back(std::abs(value - result.reference_value));
    }
    TradeoffRow row;
    row.order = n;
    detail::mean_std(gaps, row.mean_gap, row.std_gap);
    double ignored;
    detail::mean_std(values, row.mean_value, ignored);
    result.rows.push_back(row);

    ExperimentRecord record;
    record.add("order", n);
    record.add("tuples", config.tuples);
    record.add("directions", config.directions);
    record.add("replicates", config.replicates);
    record.add("mean_value", row.mean_value);
    record.add("mean_gap", row.mean_gap);
    record.add("std_gap", row.std_gap);
    record.add("reference_value", result.reference_value);
    record.add("seed", static_cast<long long>(seed.value));
    result.records.push_back(record);

    ExperimentRecord timing;
    timing.add("phase", std::string("sweep"));
    timing.add("order", n);
    timing.add("seconds", timer.seconds());
    result.timings.push_back(timing);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Direction-budget experiment: fraction of replicates within 20% of a high-L
// reference at fixed atoms, plus the empirical std of the p-powered
// statistic per direction budget.
// ---------------------------------------------------------------------------

struct DirectionsConfig {
  std::vector<std::size_t> direction_counts{8, 64, 512};
  std::size_t reference_directions = 4096;
  std::size_t order = 3;
  std::size_t tuples = 512;
  std::size_t replicates = 32;
  double p = 1.0;
  DirectionMode mode = DirectionMode::kDual;  // dual keeps c_l in [0, R^p]
  // Space pair: two SBM graph metrics, diameter exactly 1.
  std::vector<std::size_t> block_sizes{12, 12};
  double within_prob = 0.7;
  double between_prob_x = 0.25;
  double between_prob_y = 0.05;
};

struct DirectionsRow {
  std::size_t directions = 0;
  double fraction_within_20pct = 0.0;
  double std_powered = 0.0;
  double concentration_bound = 0.0;  // 1.5 * R^p / (2 sqrt(L)), R = 1
};

struct DirectionsResult {
  double reference_value = 0.0;
  std::vector<DirectionsRow> rows;
  std::vector<ExperimentRecord> records;
  std::vector<ExperimentRecord> timings;
};

inline DirectionsResult run_directions(const DirectionsConfig& config, RngSeed seed) {
  if (config.direction_counts.empty() || config.replicates == 0) {
    throw std::invalid_argument("directions: sweep and replicates must be nonempty");
  }
  SbmSpec sbm;
  sbm.block_sizes = config.block_sizes;
  sbm.within_prob = config.within_prob;
  sbm.between_prob = config.between_prob_x;
  sbm.seed = child_seed(seed, 100);
  const auto space_x = space_from_sbm(sbm);
  sbm.between_prob = config.between_prob_y;
  sbm.seed = child_seed(seed, 101);
  const auto space_y = space_from_sbm(sbm);

  // Atoms are fixed across the reference and every replicate; only the
  // direction draws vary.
  SlicedSeeds seeds;
  seeds.tuples_x = child_seed(seed, 0);
  seeds.tuples_y = child_seed(seed, 1);

  SlicedConfig base;
  base.order = config.order;
  base.tuple_count = config.tuples;
  base.p = config.p;
  base.mode = config.mode;

  DirectionsResult result;
  detail::PhaseTimer ref_timer;
  {
    SlicedConfig reference = base;
    reference.direction_count = config.reference_directions;
    seeds.directions = child_seed(seed, 2, 0);
    result.reference_value = sliced_dmw(space_x, space_y, reference, seeds).value;
  }
  {
    ExperimentRecord timing;
    timing.add("phase", std::string("reference"));
    timing.add("directions", config.reference_directions);
    timing.add("seconds", ref_timer.seconds());
    result.timings.push_back(timing);
  }

  std::vector<std::size_t> sweep = config.direction_counts;
  std::sort(sweep.begin(), sweep.end());
  for (std::size_t l : sweep) {
    SlicedConfig low = base;
    low.direction_count = l;
    std::vector<double> powered;
    std::size_t within = 0;
    detail::PhaseTimer timer;
    for (std::size_t r = 0; r < config.replicates; ++r) {
      seeds.directions = child_seed(seed, 2, r);
      const double value = sliced_dmw(space_x, space_y, low, seeds).value;
      powered.push_back(std::pow(value, config.p));
      if (std::abs(value - result.reference_value) <= 0.2 * result.reference_value) ++within;
    }
    DirectionsRow row;
    row.directions = l;
    row.fraction_within_20pct = static_cast<double>(within) / config.replicates;
    double mean_ignored;
    detail::mean_std(powered, mean_ignored, row.std_powered);
    row.concentration_bound = 1.5 / (2.0 * std::sqrt(static_cast<double>(l)));
    result.rows.push_back(row);

    ExperimentRecord record;
    record.add("directions", l);
    record.add("tuples", config.tuples);
    record.add("order", config.order);
    record.add("replicates", config.replicates);
    record.add("fraction_within_20pct", row.fraction_within_20pct);
    record.add("std_powered", row.std_powered);
    record.add("concentration_bound", row.concentration_bound);
    record.add("reference_value", result.reference_value);
    record.add("seed", static_cast<long long>(seed.value));
    result.records.push_back(record);

    ExperimentRecord timing;
    timing.add("phase", std::string("sweep"));
    timing.add("directions", l);
    timing.add("seconds", timer.seconds());
    result.timings.push_back(timing);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scalability experiment: APSP vs sliced vs exact-OT vs entropic-GW timings
// over SBM sizes, plus direction/tuple doubling rows for the cost model.
// ---------------------------------------------------------------------------

struct ScalabilityConfig {
  std::vector<std::size_t> node_counts{50, 100, 200, 400};
  std::size_t order = 8;
  std::size_t tuples = 2000;
  std::size_t directions = 256;
  double p = 1.0;
  DirectionMode mode = DirectionMode::kEuclidean;
  double within_prob = 0.5;
  double between_prob = 0.1;
  std::size_t baseline_size_cap = 100;   // exact OT / entropic GW only at or below
  std::size_t baseline_tuples = 200;     // K for the exact-OT baseline
  double wall_clock_cap_seconds = 60.0;  // per baseline instance
  std::size_t timing_reps = 3;           // min over reps to damp scheduler noise
};

struct ScalabilityRow {
  std::string phase;  // apsp | sliced | exact_ot | entropic_gw
  std::size_t node_count = 0;
  std::size_t tuples = 0;
  std::size_t directions = 0;
  double seconds = 0.0;
  double value = 0.0;
  bool skipped = false;
  std::string skip_reason;
};

struct ScalabilityResult {
  std::vector<ScalabilityRow> rows;
  std::vector<ExperimentRecord> records;
  std::vector<ExperimentRecord> timings;

  const ScalabilityRow& find(const std::string& phase, std::size_t nodes, std::size_t tuples,
                             std::size_t directions) const {
    for (const auto& row : rows) {
      if (row.phase == phase && row.node_count == nodes && row.tuples == tuples &&
          row.directions == directions) {
        return row;
      }
    }
    throw std::runtime_error("scalability: missing row " + phase);
  }
};

namespace detail {

template <typename Fn>
double timed_min(std::size_t reps, Fn&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(reps, 1); ++r) {
    PhaseTimer timer;
    fn();
    best = std::min(best, timer.seconds());
  }
  return best;
}

}  // namespace detail

inline ScalabilityResult run_scalability(const ScalabilityConfig& config, RngSeed seed) {
  if (config.node_counts.empty()) {
    throw std::invalid_argument("scalability: node counts must be nonempty");
  }
  ScalabilityResult result;
  auto push = [&](const ScalabilityRow& row) {
    result.rows.push_back(row);
    ExperimentRecord record;
    record.add("phase", row.phase);
    record.add("nodes", row.node_count);
    record.add("tuples", row.tuples);
    record.add("directions", row.directions);
    record.add("value", row.value);
    record.add("skipped", static_cast<long long>(row.skipped ? 1 : 0));
    record.add("skip_reason", row.skip_reason);
    record.add("seed", static_cast<long long>(seed.value));
    result.records.push_back(record);
    ExperimentRecord timing;
    timing.add("phase", row.phase);
    timing.add("nodes", row.node_count);
    timing.add("tuples", row.tuples);
    timing.add("directions", row.directions);
    timing.add("seconds", row.seconds);
    timing.add("skipped", static_cast<long long>(row.skipped ? 1 : 0));
    result.timings.push_back(timing);
  };

  std::vector<std::size_t> sizes = config.node_counts;
  std::sort(sizes.begin(), sizes.end());
  for (std::size_t m : sizes) {
    SbmSpec sbm;
    sbm.block_sizes = {m / 2, m - m / 2};
    sbm.within_prob = config.within_prob;
    sbm.between_prob = config.between_prob;
    sbm.seed = child_seed(seed, 0, m);
    std::optional<FiniteMetricMeasureSpace> space_x, space_y;
    const double apsp_seconds = detail::timed_min(1, [&]() {
      space_x = space_from_sbm(sbm);
      SbmSpec other = sbm;
      other.seed = child_seed(seed, 1, m);
      space_y = space_from_sbm(other);
    });
    {
      ScalabilityRow row;
      row.phase = "apsp";
      row.node_count = m;
      row.seconds = apsp_seconds;
      push(row);
    }

    // Sliced phase at the base budget plus doubling rows for the cost bands.
    struct Budget {
      std::size_t tuples, directions;
    };
    const Budget budgets[] = {{config.tuples, config.directions},
                              {config.tuples, 2 * config.directions},
                              {2 * config.tuples, config.directions}};
    const std::size_t budget_count = m == sizes.front() ? 3 : 1;
    for (std::size_t bi = 0; bi < budget_count; ++bi) {
      SlicedConfig sliced;
      sliced.order = config.order;
      sliced.tuple_count = budgets[bi].tuples;
      sliced.direction_count = budgets[bi].directions;
      sliced.p = config.p;
      sliced.mode = config.mode;
      double value = 0.0;
      const double seconds = detail::timed_min(config.timing_reps, [&]() {
        value = sliced_dmw(*space_x, *space_y, sliced, child_seed(seed, 2, m)).value;
      });
      ScalabilityRow row;
      row.phase = "sliced";
      row.node_count = m;
      row.tuples = sliced.tuple_count;
      row.directions = sliced.direction_count;
      row.seconds = seconds;
      row.value = value;
      push(row);
    }

    // Baselines with wall-clock caps, skipped above the size cap.
    {
      ScalabilityRow row;
      row.phase = "exact_ot";
      row.node_count = m;
      row.tuples = config.baseline_tuples;
      if (m > config.baseline_size_cap) {
        row.skipped = true;
        row.skip_reason = "node count above baseline cap";
      } else {
        detail::PhaseTimer timer;
        const auto law_x =
            sample_matrix_law(*space_x, config.order, config.baseline_tuples,
                              child_seed(seed, 3, m));
        const auto law_y =
            sample_matrix_law(*space_y, config.order, config.baseline_tuples,
                              child_seed(seed, 4, m));
        row.value = empirical_dmw(law_x, law_y, config.p).value;
        row.seconds = timer.seconds();
        if (row.seconds > config.wall_clock_cap_seconds) {
          row.skipped = true;
          row.skip_reason = "wall clock cap exceeded";
        }
      }
      push(row);
    }
    {
      ScalabilityRow row;
      row.phase = "entropic_gw";
      row.node_count = m;
      if (m > config.baseline_size_cap) {
        row.skipped = true;
        row.skip_reason = "node count above baseline cap";
      } else {
        detail::PhaseTimer timer;
        GwEntropicConfig gw;
        gw.epsilon = 5e-2;
        gw.max_outer = 50;
        row.value = gw_entropic(*space_x, *space_y, config.p, gw).value;
        row.seconds = timer.seconds();
        if (row.seconds > config.wall_clock_cap_seconds) {
          row.skipped = true;
          row.skip_reason = "wall clock cap exceeded";
        }
      }
      push(row);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Two-sample experiment: circle vs ellipse groups over a (Delta, group size)
// grid, MS-SDMW kernel, exact permutation test, rejection rate per cell.
// ---------------------------------------------------------------------------

struct TwoSampleExperimentConfig {
  std::vector<double> deltas{0.0, 0.04, 0.08};
  std::vector<std::size_t> group_sizes{8, 16, 32};
  std::size_t trials = 40;
  std::size_t cloud_size = 32;
  double noise_scale = 0.05;
  ScaleWeights weights{{2, 3}, {0.5, 0.5}};
  std::size_t tuples = 128;
  std::size_t directions = 32;
  DirectionMode mode = DirectionMode::kEuclidean;
  double lambda = 4.0;
  std::size_t permutations = 199;
  double alpha = 0.05;
};

struct TwoSampleCell {
  double delta = 0.0;
  std::size_t group_size = 0;
  std::size_t trials = 0;
  std::size_t rejections = 0;
  double rejection_rate = 0.0;
};

struct TwoSampleExperimentResult {
  std::vector<TwoSampleCell> cells;
  std::vector<ExperimentRecord> records;
  std::vector<ExperimentRecord> timings;

  const TwoSampleCell& find(double delta, std::size_t group_size) const {
    for (const auto& cell : cells) {
      if (cell.delta == delta && cell.group_size == group_size) return cell;
    }
    throw std::runtime_error("twosample: missing cell");
  }
};

inline TwoSampleExperimentResult run_twosample(const TwoSampleExperimentConfig& config,
                                               RngSeed seed) {
  if (config.trials == 0) throw std::invalid_argument("twosample: trials must be positive");
  config.weights.validate();
  TwoSampleExperimentResult result;

  std::vector<double> deltas = config.deltas;
  std::sort(deltas.begin(), deltas.end());
  std::vector<std::size_t> sizes = config.group_sizes;
  std::sort(sizes.begin(), sizes.end());

  std::size_t cell_index = 0;
  for (double delta : deltas) {
    for (std::size_t g : sizes) {
      detail::PhaseTimer timer;
      std::size_t rejections = 0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const RngSeed trial_seed = child_seed(seed, cell_index, t);
        std::vector<FiniteMetricMeasureSpace> spaces;
        std::vector<int> labels;
        for (std::size_t i = 0; i < 2 * g; ++i) {
          ShapeCloudSpec cloud;
          cloud.sample_count = config.cloud_size;
          cloud.noise_scale = config.noise_scale;
          cloud.seed = child_seed(trial_seed, 10, i);
          if (i < g) {
            cloud.shape = ShapeKind::kCircle;
            labels.push_back(0);
          } else {
            cloud.shape = ShapeKind::kEllipse;
            cloud.eccentricity_shift = delta;
            labels.push_back(1);
          }
          spaces.push_back(space_from_cloud(cloud));
        }
        DissimilarityConfig dissim;
        dissim.weights = config.weights;
        dissim.tuple_count = config.tuples;
        dissim.direction_count = config.directions;
        dissim.mode = config.mode;
        const auto d =
            msdmw_dissimilarity_matrix(spaces, dissim, child_seed(trial_seed, 11));
        const auto gram = gram_from_dissimilarity(d, spaces.size(), config.lambda);
        const auto test = permutation_test(gram, labels, config.permutations, config.alpha,
                                           child_seed(trial_seed, 12));
        if (test.reject) ++rejections;
      }
      TwoSampleCell cell;
      cell.delta = delta;
      cell.group_size = g;
      cell.trials = config.trials;
      cell.rejections = rejections;
      cell.rejection_rate = static_cast<double>(rejections) / config.trials;
      result.cells.push_back(cell);

      ExperimentRecord record;
      record.add("delta", delta);
      record.add("group_size", g);
      record.add("trials", config.trials);
      record.add("rejections", rejections);
      record.add("rejection_rate", cell.rejection_rate);
      record.add("permutations", config.permutations);
      record.add("alpha", config.alpha);
      record.add("seed", static_cast<long long>(seed.value));
      result.records.push_back(record);

      ExperimentRecord timing;
      timing.add("delta", delta);
      timing.add("group_size", g);
      timing.add("seconds", timer.seconds());
      result.timings.push_back(timing);
      ++cell_index;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Hierarchy and counterexample tables: exact per-order DMW values.
// ---------------------------------------------------------------------------

struct HierarchyConfig {
  std::vector<std::size_t> orders{2, 3};
  double p = 1.0;
  std::size_t enumeration_budget = 1000000;
};

struct HierarchyResult {
  HierarchyReport report;
  std::vector<ExperimentRecord> records;
};

inline HierarchyResult run_hierarchy(const FiniteMetricMeasureSpace& space_x,
                                     const FiniteMetricMeasureSpace& space_y,
                                     const HierarchyConfig& config, RngSeed seed) {
  HierarchyResult result;
  std::vector<std::size_t> orders = config.orders;
  std::sort(orders.begin(), orders.end());
  result.report =
      hierarchy_check(space_x, space_y, orders, config.p, config.enumeration_budget);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    ExperimentRecord record;
    record.add("order", orders[k]);
    record.add("p", config.p);
    record.add("value", result.report.values[k]);
    record.add("monotone", static_cast<long long>(result.report.monotone ? 1 : 0));
    record.add("seed", static_cast<long long>(seed.value));
    result.records.push_back(record);
  }
  return result;
}

inline HierarchyResult run_counterexample(const HierarchyConfig& config, RngSeed seed) {
  return run_hierarchy(space_counterexample_x(), space_counterexample_y(), config, seed);
}

// ---------------------------------------------------------------------------
// Kernel export: TU dataset -> MS-SDMW1 Gram file with metadata header.
// ---------------------------------------------------------------------------

struct KernelExportConfig {
  std::string dataset_directory;
  std::string dataset_name;
  std::optional<std::size_t> node_budget;
  ScaleWeights weights{{2, 3, 4, 6}, {0.25, 0.25, 0.25, 0.25}};
  std::size_t tuples = 128;
  std::size_t directions = 64;
  DirectionMode mode = DirectionMode::kEuclidean;
  double lambda = 1.0;
  bool clip = false;  // optional spectral-clipping repair for export
};

struct KernelExportResult {
  GramMatrix gram;
  std::vector<long> labels;
  std::vector<std::string> warnings;
  std::vector<ExperimentRecord> records;
};

inline KernelExportResult run_kernel_export(const KernelExportConfig& config, RngSeed seed,
                                            const std::string& output_path) {
  const TuDataset dataset = load_tu_dataset(config.dataset_directory, config.dataset_name,
                                            config.node_budget, child_seed(seed, 0));
  std::vector<FiniteMetricMeasureSpace> spaces;
  KernelExportResult result;
  for (const auto& graph : dataset.graphs) {
    spaces.push_back(graph.space);
    result.labels.push_back(graph.label);
  }
  result.warnings = dataset.warnings;

  DissimilarityConfig dissim;
  dissim.weights = config.weights;
  dissim.tuple_count = config.tuples;
  dissim.direction_count = config.directions;
  dissim.mode = config.mode;
  const auto d = msdmw_dissimilarity_matrix(spaces, dissim, child_seed(seed, 1));
  result.gram = gram_from_dissimilarity(d, spaces.size(), config.lambda);
  if (config.clip && !result.gram.psd_within_tolerance) {
    result.gram = clip_to_psd(result.gram);
  }

  GramExportMetadata meta;
  meta.dataset = config.dataset_name;
  meta.labels = result.labels;
  meta.lambda = config.lambda;
  meta.seed = seed.value;
  meta.scales = config.weights.scales;
  meta.scale_weights = config.weights.weights;
  meta.tuple_count = config.tuples;
  meta.direction_count = config.directions;
  meta.direction_mode = config.mode == DirectionMode::kDual ? "dual" : "euclidean";
  write_gram_file(output_path, result.gram, meta);

  ExperimentRecord record;
  record.add("dataset", config.dataset_name);
  record.add("graphs", spaces.size());
  record.add("lambda", config.lambda);
  record.add("min_eigenvalue", result.gram.min_eigenvalue);
  record.add("psd_within_tolerance",
             static_cast<long long>(result.gram.psd_within_tolerance ? 1 : 0));
  record.add("warnings", result.warnings.size());
  record.add("seed", static_cast<long long>(seed.value));
  result.records.push_back(record);
  return result;
}

}  // namespace dmw
