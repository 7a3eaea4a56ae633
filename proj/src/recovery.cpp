#include "graphdiff/recovery.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "graphdiff/errors.hpp"

namespace graphdiff {

MeasurementSystem build_system(BasisKind basis, const MultiIndexSet& s, const Eigen::Ref<const Eigen::MatrixXd>& points,
                               const Eigen::Ref<const Eigen::VectorXd>& values,
                               const std::optional<Eigen::VectorXd>& noise) {
  const auto m = points.rows();
  if (m < 1) throw DomainError("measurement system needs at least one sample");
  if (values.size() != m) throw DomainError("one function value per sample point is required");
  if (noise && noise->size() != m) throw DomainError("noise vector length must equal the sample count");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  MeasurementSystem sys{eval_basis(basis, s, points), values, points, s, basis};
  if (noise) sys.b += *noise;
  sys.psi *= scale;
  sys.b *= scale;
  return sys;
}

double weighted_l1(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& weights) {
  if (weights.size() == 0) return z.lpNorm<1>();
  return weights.cwiseProduct(z.cwiseAbs()).sum();
}

SolverReport solve_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                                 const LeastSquaresOptions& options) {
  if (b.size() != psi.rows()) throw DomainError("right-hand side length must equal the row count");
  const auto m = psi.rows();
  const auto n = psi.cols();
  SolverReport r;
  if (m < n) {
    if (!options.allow_underdetermined) {
      std::ostringstream ss;
      ss << "least squares needs m >= N (m = " << m << ", N = " << n
         << "); use a compressed sensing decoder (qcbp, srlasso)";
      throw UnderdeterminedError(ss.str());
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(psi);
    r.solution = cod.solve(b);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
    const auto& packed = qr.matrixQR();
    const double largest = n > 0 ? std::abs(packed(0, 0)) : 0.0;
    const double smallest = n > 0 ? std::abs(packed(n - 1, n - 1)) : 0.0;
    const double cond = smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
    if (n > 0 && cond > options.max_condition) {
      std::ostringstream ss;
      ss << "least-squares matrix is numerically rank deficient (condition estimate " << cond << ")";
      throw IllConditionedError(ss.str());
    }
    r.solution = qr.solve(b);
  }
  r.residual_norm = (psi * r.solution - b).norm();
  r.objective = r.residual_norm * r.residual_norm;
  r.iterations = 1;
  r.converged = true;
  return r;
}

SolverReport solve_least_squares(const MeasurementSystem& sys, const LeastSquaresOptions& options) {
  return solve_least_squares(sys.psi, sys.b, options);
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& psi, std::size_t max_iter, double rtol) {
  if (psi.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(psi.cols()) / std::sqrt(static_cast<double>(psi.cols()));
  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd w = psi.transpose() * (psi * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    v = w / nrm;
    if (std::abs(next - estimate) <= rtol * next) return next;
    estimate = next;
  }
  return estimate;
}

namespace {

void soft_threshold(Eigen::VectorXd& z, const Eigen::VectorXd& thresholds) {
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double a = std::abs(z[j]) - thresholds[j];
    z[j] = a > 0.0 ? std::copysign(a, z[j]) : 0.0;
  }
}

Eigen::VectorXd checked_weights(const Eigen::VectorXd& weights, Eigen::Index n) {
  if (weights.size() == 0) return Eigen::VectorXd::Ones(n);
  if (weights.size() != n) throw DomainError("weight vector length must equal the column count");
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) throw DomainError("weights must be strictly positive");
  return weights;
}

struct PrimalDualState {
  Eigen::VectorXd z;
  Eigen::VectorXd psi_z;
  Eigen::VectorXd xi;
  double dz = 0.0;
  double dxi = 0.0;
};

// One Chambolle-Pock step in primal-first form:
//   z+ = shrink(z - tau Psi^T xi),  zbar = 2 z+ - z,
//   xi+ = prox_dual(xi + sigma (Psi zbar - b)).
template <typename DualProx>
void primal_dual_step(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                      const Eigen::VectorXd& thresholds, double tau, double sigma, DualProx&& prox,
                      PrimalDualState& s) {
  Eigen::VectorXd z_next = s.z - tau * (psi.transpose() * s.xi);
  soft_threshold(z_next, thresholds);
  Eigen::VectorXd psi_next = psi * z_next;
  Eigen::VectorXd xi_next = s.xi + sigma * (2.0 * psi_next - s.psi_z - b);
  prox(xi_next);
  s.dz = (z_next - s.z).norm();
  s.dxi = (xi_next - s.xi).norm();
  s.z = std::move(z_next);
  s.psi_z = std::move(psi_next);
  s.xi = std::move(xi_next);
}

bool small_change(double delta, const Eigen::VectorXd& v, double tol) {
  return delta <= tol * std::max(v.norm(), std::numeric_limits<double>::min());
}

}  // namespace

SolverReport solve_qcbp(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                        double eta, const Eigen::VectorXd& weights, const SolverConfig& cfg) {
  if (b.size() != psi.rows()) throw DomainError("right-hand side length must equal the row count");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("eta must be nonnegative");
  const auto n = psi.cols();
  const Eigen::VectorXd w = checked_weights(weights, n);
  const double op_norm = spectral_norm(psi);
  const double step = op_norm > 0.0 ? 0.99 / op_norm : 1.0;
  const double tau = step;
  const double sigma = step;
  const Eigen::VectorXd thresholds = tau * w;
  const double b_norm = b.norm();
  // Never looser than tol in absolute terms, even for large ||b||.
  const double feasible = eta * (1.0 + 1e-6) + cfg.tol * std::min(1.0, b_norm);

  // prox of sigma F*, F the indicator of the eta-ball around b; the -sigma b
  // shift is already folded into the step.
  auto project = [&](Eigen::VectorXd& xi) {
    const double nrm = xi.norm();
    if (nrm <= sigma * eta) xi.setZero();
    else xi *= 1.0 - sigma * eta / nrm;
  };

  PrimalDualState s{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(psi.rows()), Eigen::VectorXd::Zero(psi.rows())};
  SolverReport r;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    primal_dual_step(psi, b, thresholds, tau, sigma, project, s);
    r.iterations = it;
    if (small_change(s.dz, s.z, cfg.tol) && small_change(s.dxi, s.xi, cfg.tol) &&
        (s.psi_z - b).norm() <= feasible) {
      r.converged = true;
      break;
    }
  }
  r.solution = std::move(s.z);
  r.residual_norm = (psi * r.solution - b).norm();
  r.objective = weighted_l1(r.solution, w);
  if (!r.converged && r.residual_norm - eta > 1e3 * cfg.tol * std::max(1.0, b_norm)) {
    std::ostringstream ss;
    ss << "residual " << r.residual_norm << " stalls above eta = " << eta << "; the constraint may be infeasible";
    r.warning = ss.str();
  }
  return r;
}

SolverReport solve_srlasso(const Eigen::Ref<const Eigen::MatrixXd>& psi, const Eigen::Ref<const Eigen::VectorXd>& b,
                           double lambda, const Eigen::VectorXd& weights, const SolverConfig& cfg) {
  if (b.size() != psi.rows()) throw DomainError("right-hand side length must equal the row count");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  const auto n = psi.cols();
  const Eigen::VectorXd w = checked_weights(weights, n);
  const double op_norm = spectral_norm(psi);
  const double step = op_norm > 0.0 ? 0.99 / op_norm : 1.0;
  const double tau = step;
  const double sigma = step;
  const Eigen::VectorXd thresholds = tau * lambda * w;

  // prox of sigma F*, F = ||. - b||_2: projection onto the unit ball.
  auto project = [](Eigen::VectorXd& xi) {
    const double nrm = xi.norm();
    if (nrm > 1.0) xi /= nrm;
  };
  auto objective = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& psi_z) {
    return lambda * weighted_l1(z, w) + (psi_z - b).norm();
  };

  PrimalDualState s{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(psi.rows()), Eigen::VectorXd::Zero(psi.rows())};
  Eigen::VectorXd best = s.z;
  double best_objective = objective(s.z, s.psi_z);
  SolverReport r;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    primal_dual_step(psi, b, thresholds, tau, sigma, project, s);
    r.iterations = it;
    const double obj = objective(s.z, s.psi_z);
    if (obj < best_objective) {
      best_objective = obj;
      best = s.z;
    }
    if (small_change(s.dz, s.z, cfg.tol) && small_change(s.dxi, s.xi, cfg.tol)) {
      r.converged = true;
      break;
    }
  }
  r.solution = std::move(best);
  r.residual_norm = (psi * r.solution - b).norm();
  r.objective = lambda * weighted_l1(r.solution, w) + r.residual_norm;
  return r;
}

nlohmann::json report_to_json(const SolverReport& r) {
  nlohmann::json j{{"solution", std::vector<double>(r.solution.data(), r.solution.data() + r.solution.size())},
                   {"iterations", r.iterations},
                   {"residual_norm", r.residual_norm},
                   {"objective", r.objective},
                   {"converged", r.converged}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

}  // namespace graphdiff
