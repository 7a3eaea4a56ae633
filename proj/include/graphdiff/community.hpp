#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphdiff/graph.hpp"

namespace graphdiff {

/// Assignment of every node to one of K non-empty communities.
/// Community ids are 0-based in the C++ API and 1-based in JSON.
class CommunityPartition {
 public:
  CommunityPartition(std::vector<std::size_t> assignment, std::size_t k);

  /// Contiguous blocks of the given sizes, in order.
  static CommunityPartition from_sizes(const std::vector<std::size_t>& sizes);

  std::size_t k() const { return k_; }
  std::size_t n_nodes() const { return assignment_.size(); }
  std::size_t community_of(std::size_t node) const { return assignment_.at(node); }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  std::vector<std::size_t> sizes() const;

 private:
  std::vector<std::size_t> assignment_;
  std::size_t k_;
};

/// Lexicographic enumeration of unordered community pairs {i <= j}; this is
/// the map from a pair of communities to a parameter coordinate.
class BlockIndexMap {
 public:
  explicit BlockIndexMap(std::size_t k);

  std::size_t k() const { return k_; }
  /// K(K+1)/2.
  std::size_t dimension() const { return k_ * (k_ + 1) / 2; }
  /// Symmetric in (i, j); 0-based on both sides.
  std::size_t operator()(std::size_t i, std::size_t j) const;

 private:
  std::size_t k_;
};

inline BlockIndexMap block_index_map(std::size_t k) { return BlockIndexMap(k); }

struct FluidOptions {
  std::size_t max_iter = 100;
};

struct FluidResult {
  CommunityPartition partition;
  std::size_t sweeps = 0;
  /// False when max_iter sweeps elapsed before a sweep without changes.
  bool converged = false;
};

/// Fluid communities on the unweighted view of `g`. Requires a connected
/// graph and 1 <= K <= n.
FluidResult fluid_communities(const WeightedGraph& g, std::size_t k, std::uint64_t seed,
                              const FluidOptions& options = {});

nlohmann::json partition_to_json(const CommunityPartition& p);
CommunityPartition partition_from_json(const nlohmann::json& j);

}  // namespace graphdiff
