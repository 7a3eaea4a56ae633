#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "graphdiff/diffusion.hpp"
#include "graphdiff/polyspace.hpp"
#include "graphdiff/recovery.hpp"

namespace graphdiff {

enum class Method { LeastSquares, Qcbp, WeightedQcbp, SrLasso, WeightedSrLasso };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
bool is_weighted(Method m);

struct MethodParams {
  double eta = 1e-8;
  /// SR-LASSO parameter; unset means 1 / (8 sqrt(m)).
  std::optional<double> lambda;
  SolverConfig solver;
  LeastSquaresOptions least_squares;
};

double default_lambda(std::size_t m);

struct SurrogateMetadata {
  Method method = Method::LeastSquares;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t node = 0;
  double final_time = 1.0;
  std::size_t iterations = 0;
  bool converged = true;
  double residual_norm = 0.0;
};

/// f(y) ~ sum_j coefficients_j psi_{nu_j}(y).
struct SurrogateModel {
  BasisKind basis = BasisKind::Legendre;
  MultiIndexSet index_set;
  Eigen::VectorXd coefficients;
  SurrogateMetadata metadata;

  void validate() const;
};

struct TestSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd values;
};

/// Runs the decoder selected by `method` on an assembled system.
SolverReport run_decoder(const MeasurementSystem& sys, Method method, const MethodParams& params);

/// Fits from precomputed samples and values (noiseless unless `noise`).
SurrogateModel fit_from_samples(BasisKind basis, const MultiIndexSet& s,
                                const Eigen::Ref<const Eigen::MatrixXd>& points,
                                const Eigen::Ref<const Eigen::VectorXd>& values, Method method,
                                const MethodParams& params,
                                const std::optional<Eigen::VectorXd>& noise = std::nullopt);

/// Samples m points from the basis measure, evaluates u_v(T) at each,
/// and recovers coefficients. `node` is 0-based.
SurrogateModel fit_surrogate(const DiffusionProblem& p, std::size_t node, BasisKind basis,
                             const MultiIndexSet& s, std::size_t m, Method method,
                             const MethodParams& params, std::uint64_t seed, std::size_t threads = 1);

/// Uniform test points on [-1,1]^d with exact solution-map values.
TestSet make_test_set(const SolutionMap& f, std::size_t m_test, std::uint64_t seed, std::size_t threads = 1);

Eigen::VectorXd evaluate(const SurrogateModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points);

double rmse(const SurrogateModel& model, const TestSet& test);
double rmse(const Eigen::Ref<const Eigen::VectorXd>& predicted, const Eigen::Ref<const Eigen::VectorXd>& actual);

/// l^q norm of c after zeroing its s largest-magnitude entries (ties by
/// lower index first). q = infinity is the max norm; 0 < q < 1 the usual
/// quasi-norm.
double best_s_term_error(const Eigen::Ref<const Eigen::VectorXd>& c, std::size_t s, double q = 2.0);

nlohmann::json model_to_json(const SurrogateModel& model);
SurrogateModel model_from_json(const nlohmann::json& j);

}  // namespace graphdiff
