#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphdiff/community.hpp"
#include "graphdiff/diffusion.hpp"
#include "graphdiff/graph.hpp"
#include "graphdiff/polyspace.hpp"
#include "graphdiff/surrogate.hpp"

namespace graphdiff {

enum class SweepKind { SampleCount, Cardinality, Dimension, Size, Dataset };

std::string_view to_string(SweepKind k);
SweepKind parse_sweep_kind(std::string_view name);

struct DatasetSource {
  std::string path;
  EdgeListOptions options;
  std::optional<std::size_t> expected_nodes;
  /// Compared against the number of edge lines read (self-loops excluded).
  std::optional<std::size_t> expected_edges;
  std::uint64_t community_seed = 1;
  std::size_t fluid_max_iter = 100;
};

struct InitialConditionSpec {
  /// 1-based node carrying unit mass; ignored when `values` is set.
  std::size_t node = 1;
  std::vector<double> values;

  Eigen::VectorXd build(std::size_t n_nodes) const;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  SweepKind sweep = SweepKind::SampleCount;

  SbmSpec sbm{{10, 10}, 1.0, 0.04, 1.0};
  std::uint64_t graph_seed = 1;
  std::optional<DatasetSource> dataset;

  std::size_t k = 2;
  /// 1-based node whose value u_v(T) is approximated.
  std::size_t node = 2;
  double final_time = 1.0;
  InitialConditionSpec u0;
  std::vector<TimeProfile> profiles;

  BasisKind basis = BasisKind::Legendre;
  IndexFamily family = IndexFamily::TotalDegree;
  unsigned order = 8;

  std::vector<Method> methods{Method::LeastSquares, Method::Qcbp, Method::WeightedQcbp};
  std::vector<std::size_t> m_values{100, 200, 500};
  std::size_t repeats = 20;
  std::size_t test_size = 1000;
  std::uint64_t master_seed = 2024;
  MethodParams params;

  /// Cardinality sweep: orders at fixed m.
  std::vector<unsigned> orders;
  std::size_t fixed_m = 350;

  /// Dimension sweep: K values on `total_nodes` nodes; orders per K either
  /// explicit (`dimension_orders`) or matched to `target_cardinalities`.
  std::vector<std::size_t> communities_list;
  std::size_t total_nodes = 24;
  std::vector<unsigned> dimension_orders;
  std::vector<std::size_t> target_cardinalities;

  /// Size sweep: nodes per community with K fixed.
  std::vector<std::size_t> nodes_per_community;

  std::size_t threads = 1;
  std::string output;

  void validate() const;
};

/// Reads a JSON config; every key is optional except where the sweep needs it.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// GRAPHDIFF_OUTPUT_DIR relocates `output` into that directory,
/// GRAPHDIFF_THREADS sets the worker count.
void apply_environment(ExperimentConfig& cfg);

TimeProfile profile_from_json(const nlohmann::json& j);

/// One independent run: (method, m, repeat) at one sweep point.
struct RunRecord {
  std::size_t point = 0;
  Method method = Method::LeastSquares;
  std::size_t m = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double wall_time_s = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool skipped = false;
  bool failed = false;
  std::string error;
};

struct AggregateRow {
  std::string experiment_id;
  Method method = Method::LeastSquares;
  BasisKind basis = BasisKind::Legendre;
  IndexFamily family = IndexFamily::TotalDegree;
  unsigned order = 0;
  std::size_t cardinality = 0;
  std::size_t d = 0;
  std::size_t n_nodes = 0;
  std::size_t m = 0;
  std::size_t repeats = 0;
  double rmse_geomean = 0.0;
  double rmse_geostd = 0.0;
  double mean_runtime_s = 0.0;
  std::size_t failures = 0;
  /// ok | partial | failed | skipped
  std::string status;
};

struct ExperimentResult {
  std::vector<AggregateRow> rows;
  std::vector<RunRecord> records;
  /// Community sizes found on dataset graphs (empty otherwise).
  std::vector<std::size_t> community_sizes;
  std::size_t dataset_nodes = 0;
  std::size_t dataset_edges = 0;

  bool all_succeeded() const;
};

struct GeometricStats {
  double mean = 0.0;
  double stddev = 1.0;
};

/// exp(mean(log x)) and exp(std(log x)), population std.
GeometricStats geometric_stats(const std::vector<double>& values);

/// Pure function of (master seed, method, m, repeat).
std::uint64_t cell_seed(std::uint64_t master, Method method, std::size_t m, std::size_t repeat);
std::uint64_t test_seed(std::uint64_t master, std::size_t repeat);

/// A problem plus index set at which cells are run.
struct SweepPoint {
  DiffusionProblem problem;
  std::size_t node = 0;  // 0-based
  MultiIndexSet index_set;
};

/// Runs every (method, m, repeat) cell over the given points and aggregates.
ExperimentResult run_points(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                            const std::vector<std::size_t>& m_values);

ExperimentResult run_m_sweep(const ExperimentConfig& cfg);
ExperimentResult run_cardinality_sweep(const ExperimentConfig& cfg);
ExperimentResult run_dimension_sweep(const ExperimentConfig& cfg);
ExperimentResult run_size_sweep(const ExperimentConfig& cfg);
ExperimentResult run_dataset_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Problem on an SBM graph using its planted communities.
DiffusionProblem sbm_problem(const SbmSpec& sbm, std::uint64_t graph_seed, const ExperimentConfig& cfg);

extern const std::vector<std::string> kCsvColumns;
void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::vector<AggregateRow>& rows);
/// Appends rows, writing the header first when the file is new or empty.
void append_csv(const std::string& path, const std::vector<AggregateRow>& rows);

}  // namespace graphdiff
