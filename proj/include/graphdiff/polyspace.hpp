#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace graphdiff {

using MultiIndex = std::vector<unsigned>;

enum class IndexFamily { TotalDegree, HyperbolicCross, Explicit };

/// Graded order: total degree ascending, ties lexicographically descending,
/// so d=2 starts (0,0), (1,0), (0,1), (2,0), ...
bool graded_less(const MultiIndex& a, const MultiIndex& b);

/// Distinct multi-indices of a common dimension in graded order.
class MultiIndexSet {
 public:
  MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices,
                IndexFamily family = IndexFamily::Explicit, unsigned order = 0);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  IndexFamily family() const { return family_; }
  unsigned order() const { return order_; }

  bool contains(const MultiIndex& nu) const;
  /// Position of `nu`, or size() when absent.
  std::size_t position(const MultiIndex& nu) const;
  /// Largest entry in coordinate k over the set.
  unsigned max_degree(std::size_t k) const;

 private:
  std::size_t dimension_;
  std::vector<MultiIndex> indices_;
  IndexFamily family_;
  unsigned order_;
};

/// {nu : sum nu_k <= n}
MultiIndexSet total_degree_set(std::size_t d, unsigned n);
/// {nu : prod (nu_k + 1) <= n + 1}
MultiIndexSet hyperbolic_cross_set(std::size_t d, unsigned n);
MultiIndexSet make_index_set(IndexFamily family, std::size_t d, unsigned n);

/// Downward closed: every componentwise-smaller index is present.
bool is_lower(const MultiIndexSet& s);

/// binomial(n + d, d), the size of the total degree set.
std::uint64_t total_degree_cardinality(std::size_t d, unsigned n);

/// Order whose set size is closest to `target` (smallest order on ties),
/// searching orders 0..max_order.
unsigned order_for_cardinality(IndexFamily family, std::size_t d, std::size_t target,
                               unsigned max_order = 4096);

enum class BasisKind { Legendre, Chebyshev };

/// Orthonormal univariate values psi_0..psi_degree at y.
void univariate_basis(BasisKind kind, double y, unsigned degree, std::span<double> out);

/// Row i, column j holds psi_{nu_j}(points_i). Throws DomainError for
/// points outside [-1,1]^d.
Eigen::MatrixXd eval_basis(BasisKind kind, const MultiIndexSet& s,
                           const Eigen::Ref<const Eigen::MatrixXd>& points);

/// w_nu = ||psi_nu||_inf on [-1,1]^d.
Eigen::VectorXd intrinsic_weights(BasisKind kind, const MultiIndexSet& s);

/// i.i.d. rows from the basis measure: uniform, or arcsine via cos(pi U).
Eigen::MatrixXd sample_measure(BasisKind kind, std::size_t d, std::size_t m, std::uint64_t seed);

std::string_view to_string(BasisKind kind);
std::string_view to_string(IndexFamily family);
BasisKind parse_basis_kind(std::string_view name);
IndexFamily parse_index_family(std::string_view name);

nlohmann::json index_set_to_json(const MultiIndexSet& s);
MultiIndexSet index_set_from_json(const nlohmann::json& j);

}  // namespace graphdiff
