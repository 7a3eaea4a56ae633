#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphdiff/community.hpp"
#include "graphdiff/graph.hpp"

namespace graphdiff {

/// Time modulation h(t) of one block diffusivity.
class TimeProfile {
 public:
  struct Constant {
    double value = 1.0;
  };
  /// sum_i coeffs[i] * t^i
  struct Polynomial {
    std::vector<double> coeffs;
  };
  /// offset + amplitude * sin(2*pi*frequency*t + phase)
  struct Sinusoid {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    double offset = 1.0;
  };

  TimeProfile() = default;
  TimeProfile(Constant c) : kind_(c) {}
  TimeProfile(Polynomial p) : kind_(std::move(p)) {}
  TimeProfile(Sinusoid s) : kind_(s) {}

  static TimeProfile constant(double v) { return TimeProfile(Constant{v}); }

  double operator()(double t) const;
  bool is_constant() const;
  /// Upper bound on |h(t)| for t in [0, horizon].
  double sup_abs(double horizon) const;

  const std::variant<Constant, Polynomial, Sinusoid>& kind() const { return kind_; }

 private:
  std::variant<Constant, Polynomial, Sinusoid> kind_{Constant{}};
};

/// Block-constant parametric diffusivity: the (u, v) entry of C(t, y) is
/// ((y_s + 1) / 2) * h_s(t) with s = sigma(community(u), community(v)).
class DiffusivitySpec {
 public:
  explicit DiffusivitySpec(CommunityPartition partition, std::vector<TimeProfile> profiles = {});

  const CommunityPartition& partition() const { return partition_; }
  const BlockIndexMap& block_map() const { return map_; }
  const std::vector<TimeProfile>& profiles() const { return profiles_; }
  std::size_t dimension() const { return map_.dimension(); }
  std::size_t n_nodes() const { return partition_.n_nodes(); }
  bool time_independent() const;

  /// Per-coordinate block values ((y_s + 1) / 2) * h_s(t).
  Eigen::VectorXd block_values(double t, const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  CommunityPartition partition_;
  BlockIndexMap map_;
  std::vector<TimeProfile> profiles_;
};

struct DiffusionProblem {
  WeightedGraph graph;
  DiffusivitySpec spec;
  Eigen::VectorXd u0;
  double final_time = 1.0;

  void validate() const;
};

/// Unit mass at `node` (0-based).
Eigen::VectorXd unit_initial_condition(std::size_t n_nodes, std::size_t node);

Eigen::MatrixXd assemble_c(const DiffusivitySpec& spec, double t,
                           const Eigen::Ref<const Eigen::VectorXd>& y);

/// M = C (.) W - D(C, W) with D_ii = sum_k C_ik W_ik.
Eigen::MatrixXd assemble_m(const Eigen::Ref<const Eigen::MatrixXd>& c,
                           const Eigen::Ref<const Eigen::MatrixXd>& w);

enum class SolverPath { Auto, Eigen, RungeKutta };

struct DiffusionOptions {
  SolverPath path = SolverPath::Auto;
  /// Step rule h * max_t ||M(t)||_inf <= step_factor.
  double step_factor = 0.1;
  /// Richardson acceptance: halving h moves the answer by less than this.
  double rtol = 1e-8;
  std::size_t max_steps = std::size_t{1} << 22;
};

struct DiffusionResult {
  Eigen::VectorXd u;
  SolverPath path = SolverPath::Eigen;
  /// RK4 steps of the accepted solution (0 on the eigendecomposition path).
  std::size_t steps = 0;
};

/// u(T) for du/dt = M(t, y) u, u(0) = u0. With all profiles constant the
/// Auto path uses exp(T M) u0 through a symmetric eigendecomposition,
/// otherwise fixed-step RK4 with Richardson step halving.
DiffusionResult solve_diffusion_detailed(const DiffusionProblem& p,
                                         const Eigen::Ref<const Eigen::VectorXd>& y,
                                         const DiffusionOptions& options = {});

inline Eigen::VectorXd solve_diffusion(const DiffusionProblem& p,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const DiffusionOptions& options = {}) {
  return solve_diffusion_detailed(p, y, options).u;
}

/// y -> u_v(T, C(., y)) for a fixed node v (0-based).
class SolutionMap {
 public:
  SolutionMap(DiffusionProblem problem, std::size_t node, DiffusionOptions options = {});

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  /// One value per row of `points`; rows are independent and spread over
  /// `threads` workers.
  Eigen::VectorXd evaluate_rows(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                std::size_t threads = 1) const;

  std::size_t dimension() const { return problem_.spec.dimension(); }
  std::size_t node() const { return node_; }
  const DiffusionProblem& problem() const { return problem_; }

 private:
  DiffusionProblem problem_;
  std::size_t node_;
  DiffusionOptions options_;
};

inline SolutionMap solution_map(DiffusionProblem p, std::size_t node) {
  return SolutionMap(std::move(p), node);
}

}  // namespace graphdiff
