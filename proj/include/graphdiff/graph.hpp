#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace graphdiff {

/// Undirected weighted graph stored as a dense symmetric adjacency matrix
/// with zero diagonal. Immutable after construction.
class WeightedGraph {
 public:
  /// Validates symmetry (bitwise), zero diagonal, nonnegative finite entries.
  explicit WeightedGraph(Eigen::MatrixXd weights,
                         std::vector<std::string> labels = {});

  /// Single node, no edges.
  WeightedGraph() : WeightedGraph(Eigen::MatrixXd::Zero(1, 1)) {}

  struct Edge {
    std::size_t u;
    std::size_t v;
    double weight;
  };
  /// Builds from unordered edges; later duplicates overwrite earlier ones.
  static WeightedGraph from_edges(std::size_t n_nodes,
                                  const std::vector<Edge>& edges,
                                  std::vector<std::string> labels = {});

  std::size_t n_nodes() const { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// A_ij = 1 iff W_ij != 0.
  Eigen::MatrixXd adjacency() const;
  Eigen::VectorXd degrees(bool weighted) const;
  /// Number of unordered pairs with nonzero weight.
  std::size_t edge_count() const;
  /// Edges with u < v, in row-major order.
  std::vector<Edge> edges() const;
  /// Neighbour lists of the unweighted view, ascending.
  std::vector<std::vector<std::size_t>> neighbors() const;
  bool is_connected() const;

 private:
  Eigen::MatrixXd weights_;
  std::vector<std::string> labels_;
};

struct SbmSpec {
  std::vector<std::size_t> community_sizes;
  double p_intra = 1.0;
  double p_inter = 0.0;
  double edge_weight = 1.0;

  void validate() const;
};

/// Stochastic block model. Nodes of community k occupy a contiguous range in
/// the order of `community_sizes`.
WeightedGraph generate_sbm(const SbmSpec& spec, std::uint64_t seed);

/// Community id (0-based) of each node of an SBM graph built from `spec`.
std::vector<std::size_t> sbm_assignment(const SbmSpec& spec);

/// L = D - A (unweighted) or D_w - W (weighted). Diagonals are the negated
/// sums of the off-diagonal row entries.
Eigen::MatrixXd laplacian(const WeightedGraph& g, bool weighted);

enum class Symmetrize { Max, Mean, Sum };

struct EdgeListOptions {
  bool weighted = true;
  Symmetrize symmetrize = Symmetrize::Mean;
  bool one_indexed = false;
  std::string comment_prefix = "#";
};

struct EdgeListResult {
  WeightedGraph graph;
  /// Edge lines read, self-loops excluded.
  std::size_t records = 0;
  std::size_t self_loops = 0;
};

/// Reads "u v", "u v w" or "u v {'weight': w}" lines. Node ids are compacted
/// to 0..n-1 in order of first appearance; labels keep the original ids.
EdgeListResult read_edge_list(std::string_view text, const EdgeListOptions& options = {});
WeightedGraph parse_edge_list(std::string_view text, const EdgeListOptions& options = {});
EdgeListResult read_edge_list_file(const std::string& path, const EdgeListOptions& options = {});

Symmetrize parse_symmetrize(std::string_view name);

nlohmann::json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const nlohmann::json& j);

}  // namespace graphdiff
