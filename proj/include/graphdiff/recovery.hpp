#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "graphdiff/polyspace.hpp"

namespace graphdiff {

/// Psi_ij = psi_{nu_j}(y_i) / sqrt(m), b_i = (f(y_i) + n_i) / sqrt(m).
struct MeasurementSystem {
  Eigen::MatrixXd psi;
  Eigen::VectorXd b;
  Eigen::MatrixXd sample_points;
  MultiIndexSet index_set;
  BasisKind basis = BasisKind::Legendre;

  std::size_t rows() const { return static_cast<std::size_t>(psi.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(psi.cols()); }
};

MeasurementSystem build_system(BasisKind basis, const MultiIndexSet& s,
                               const Eigen::Ref<const Eigen::MatrixXd>& points,
                               const Eigen::Ref<const Eigen::VectorXd>& values,
                               const std::optional<Eigen::VectorXd>& noise = std::nullopt);

struct SolverReport {
  Eigen::VectorXd solution;
  std::size_t iterations = 0;
  /// ||Psi c - b||_2 recomputed from the returned solution.
  double residual_norm = 0.0;
  double objective = 0.0;
  bool converged = false;
  /// Empty unless the solver has something to flag (e.g. infeasibility).
  std::string warning;
};

struct SolverConfig {
  std::size_t max_iter = 5000;
  double tol = 1e-8;
};

struct LeastSquaresOptions {
  /// Return the minimum-norm solution instead of refusing when m < N.
  bool allow_underdetermined = false;
  double max_condition = 1e12;
};

/// argmin ||Psi z - b||_2 by column-pivoted Householder QR.
SolverReport solve_least_squares(const MeasurementSystem& sys, const LeastSquaresOptions& options = {});
SolverReport solve_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& psi,
                                 const Eigen::Ref<const Eigen::VectorXd>& b,
                                 const LeastSquaresOptions& options = {});

/// Largest singular value by power iteration on Psi^T Psi.
double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& psi, std::size_t max_iter = 100,
                     double rtol = 1e-8);

/// min ||z||_{1,w} s.t. ||Psi z - b||_2 <= eta, by primal-dual iteration.
/// Empty weights mean all ones.
SolverReport solve_qcbp(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                        double eta, const Eigen::VectorXd& weights = {}, const SolverConfig& cfg = {});
inline SolverReport solve_qcbp(const MeasurementSystem& sys, double eta, const Eigen::VectorXd& weights = {},
                               const SolverConfig& cfg = {}) {
  return solve_qcbp(sys.psi, sys.b, eta, weights, cfg);
}

/// min lambda ||z||_{1,w} + ||Psi z - b||_2, by primal-dual iteration.
SolverReport solve_srlasso(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                           double lambda, const Eigen::VectorXd& weights = {}, const SolverConfig& cfg = {});
inline SolverReport solve_srlasso(const MeasurementSystem& sys, double lambda, const Eigen::VectorXd& weights = {},
                                  const SolverConfig& cfg = {}) {
  return solve_srlasso(sys.psi, sys.b, lambda, weights, cfg);
}

double weighted_l1(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& weights);

nlohmann::json report_to_json(const SolverReport& r);

}  // namespace graphdiff
