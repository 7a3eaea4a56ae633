#include "graphdiff/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "graphdiff/errors.hpp"
#include "graphdiff/random.hpp"

namespace graphdiff {

namespace {

unsigned degree_of(const MultiIndex& nu) { return std::accumulate(nu.begin(), nu.end(), 0u); }

void total_degree_rec(std::size_t k, unsigned budget, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (k == cur.size()) {
    out.push_back(cur);
    return;
  }
  for (unsigned v = 0; v <= budget; ++v) {
    cur[k] = v;
    total_degree_rec(k + 1, budget - v, cur, out);
  }
  cur[k] = 0;
}

// Depth-first over coordinates; `room` is the largest admissible product of
// (nu_j + 1) over the remaining coordinates.
void hyperbolic_rec(std::size_t k, unsigned long long room, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (k == cur.size()) {
    out.push_back(cur);
    return;
  }
  for (unsigned long long v = 0; v + 1 <= room; ++v) {
    cur[k] = static_cast<unsigned>(v);
    hyperbolic_rec(k + 1, room / (v + 1), cur, out);
  }
  cur[k] = 0;
}

}  // namespace

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
  const auto da = degree_of(a);
  const auto db = degree_of(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

MultiIndexSet::MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices, IndexFamily family,
                             unsigned order)
    : dimension_(dimension), indices_(std::move(indices)), family_(family), order_(order) {
  if (dimension_ < 1) throw DomainError("multi-index dimension must be at least 1");
  for (const auto& nu : indices_)
    if (nu.size() != dimension_) throw DomainError("multi-index has the wrong dimension");
  std::sort(indices_.begin(), indices_.end(), graded_less);
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw DomainError("multi-index set contains duplicates");
}

std::size_t MultiIndexSet::position(const MultiIndex& nu) const {
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), nu, graded_less);
  if (it != indices_.end() && *it == nu) return static_cast<std::size_t>(it - indices_.begin());
  return indices_.size();
}

bool MultiIndexSet::contains(const MultiIndex& nu) const {
  return nu.size() == dimension_ && position(nu) < indices_.size();
}

unsigned MultiIndexSet::max_degree(std::size_t k) const {
  unsigned best = 0;
  for (const auto& nu : indices_) best = std::max(best, nu[k]);
  return best;
}

MultiIndexSet total_degree_set(std::size_t d, unsigned n) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  total_degree_rec(0, n, cur, out);
  return MultiIndexSet(d, std::move(out), IndexFamily::TotalDegree, n);
}

MultiIndexSet hyperbolic_cross_set(std::size_t d, unsigned n) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  hyperbolic_rec(0, static_cast<unsigned long long>(n) + 1, cur, out);
  return MultiIndexSet(d, std::move(out), IndexFamily::HyperbolicCross, n);
}

MultiIndexSet make_index_set(IndexFamily family, std::size_t d, unsigned n) {
  switch (family) {
    case IndexFamily::TotalDegree: return total_degree_set(d, n);
    case IndexFamily::HyperbolicCross: return hyperbolic_cross_set(d, n);
    case IndexFamily::Explicit: break;
  }
  throw DomainError("explicit index sets have no generator");
}

bool is_lower(const MultiIndexSet& s) {
  std::set<MultiIndex> members(s.begin(), s.end());
  for (const auto& nu : s) {
    MultiIndex mu = nu;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (mu[k] == 0) continue;
      --mu[k];
      if (!members.contains(mu)) return false;
      ++mu[k];
    }
  }
  return true;
}

std::uint64_t total_degree_cardinality(std::size_t d, unsigned n) {
  // binomial(n + d, min(n, d)) by the multiplicative formula; exact at each step.
  const std::uint64_t top = static_cast<std::uint64_t>(n) + d;
  const std::uint64_t k = std::min<std::uint64_t>(n, d);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (top - k + i) / i;
  return r;
}

unsigned order_for_cardinality(IndexFamily family, std::size_t d, std::size_t target, unsigned max_order) {
  unsigned best = 0;
  std::size_t best_gap = static_cast<std::size_t>(-1);
  for (unsigned n = 0; n <= max_order; ++n) {
    const std::size_t size = family == IndexFamily::TotalDegree
                                 ? static_cast<std::size_t>(total_degree_cardinality(d, n))
                                 : make_index_set(family, d, n).size();
    const std::size_t gap = size > target ? size - target : target - size;
    if (gap < best_gap) {
      best_gap = gap;
      best = n;
    }
    if (size > target) break;  // sizes are nondecreasing in n
  }
  return best;
}

void univariate_basis(BasisKind kind, double y, unsigned degree, std::span<double> out) {
  out[0] = 1.0;
  if (degree == 0) return;
  if (kind == BasisKind::Legendre) {
    double p_prev = 1.0;
    double p = y;
    out[1] = std::sqrt(3.0) * y;
    for (unsigned n = 1; n < degree; ++n) {
      const double next = ((2.0 * n + 1.0) * y * p - n * p_prev) / (n + 1.0);
      p_prev = p;
      p = next;
      out[n + 1] = std::sqrt(2.0 * (n + 1) + 1.0) * p;
    }
  } else {
    double t_prev = 1.0;
    double t = y;
    out[1] = std::numbers::sqrt2 * y;
    for (unsigned n = 1; n < degree; ++n) {
      const double next = 2.0 * y * t - t_prev;
      t_prev = t;
      t = next;
      out[n + 1] = std::numbers::sqrt2 * t;
    }
  }
}

Eigen::MatrixXd eval_basis(BasisKind kind, const MultiIndexSet& s, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  const auto d = s.dimension();
  if (static_cast<std::size_t>(points.cols()) != d && points.rows() > 0)
    throw DomainError("point dimension does not match the index set");
  const auto m = points.rows();
  const auto n_terms = static_cast<Eigen::Index>(s.size());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      const double y = points(i, k);
      if (!(y >= -1.0 && y <= 1.0)) throw DomainError("point outside [-1,1]^d");
    }

  std::vector<unsigned> max_deg(d);
  for (std::size_t k = 0; k < d; ++k) max_deg[k] = s.max_degree(k);

  Eigen::MatrixXd out(m, n_terms);
  std::vector<std::vector<double>> table(d);
  for (std::size_t k = 0; k < d; ++k) table[k].resize(max_deg[k] + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k)
      univariate_basis(kind, points(i, static_cast<Eigen::Index>(k)), max_deg[k], table[k]);
    for (Eigen::Index j = 0; j < n_terms; ++j) {
      const auto& nu = s[static_cast<std::size_t>(j)];
      double v = 1.0;
      for (std::size_t k = 0; k < d; ++k)
        if (nu[k] != 0) v *= table[k][nu[k]];
      out(i, j) = v;
    }
  }
  return out;
}

Eigen::VectorXd intrinsic_weights(BasisKind kind, const MultiIndexSet& s) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    double v = 1.0;
    for (auto nu_k : s[j]) {
      if (nu_k == 0) continue;
      v *= kind == BasisKind::Legendre ? std::sqrt(2.0 * nu_k + 1.0) : std::numbers::sqrt2;
    }
    w[static_cast<Eigen::Index>(j)] = v;
  }
  return w;
}

Eigen::MatrixXd sample_measure(BasisKind kind, std::size_t d, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      const double u = uniform01(rng);
      pts(i, k) = kind == BasisKind::Legendre ? 2.0 * u - 1.0 : std::cos(std::numbers::pi * u);
    }
  return pts;
}

std::string_view to_string(BasisKind kind) {
  return kind == BasisKind::Legendre ? "legendre" : "chebyshev";
}

std::string_view to_string(IndexFamily family) {
  switch (family) {
    case IndexFamily::TotalDegree: return "td";
    case IndexFamily::HyperbolicCross: return "hc";
    case IndexFamily::Explicit: return "explicit";
  }
  return "explicit";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "legendre") return BasisKind::Legendre;
  if (name == "chebyshev") return BasisKind::Chebyshev;
  throw InvalidSpecError("unknown basis '" + std::string(name) + "'");
}

IndexFamily parse_index_family(std::string_view name) {
  if (name == "td" || name == "total_degree") return IndexFamily::TotalDegree;
  if (name == "hc" || name == "hyperbolic_cross") return IndexFamily::HyperbolicCross;
  if (name == "explicit") return IndexFamily::Explicit;
  throw InvalidSpecError("unknown index family '" + std::string(name) + "'");
}

nlohmann::json index_set_to_json(const MultiIndexSet& s) {
  return nlohmann::json(s.indices());
}

MultiIndexSet index_set_from_json(const nlohmann::json& j) {
  try {
    auto indices = j.get<std::vector<MultiIndex>>();
    if (indices.empty()) throw DomainError("index set JSON is empty");
    const auto d = indices.front().size();
    return MultiIndexSet(d, std::move(indices));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("index set JSON: ") + e.what());
  }
}

}  // namespace graphdiff
