#include "graphdiff/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "graphdiff/errors.hpp"
#include "graphdiff/parallel.hpp"

namespace graphdiff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_parameter(const DiffusivitySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (static_cast<std::size_t>(y.size()) != spec.dimension()) {
    std::ostringstream ss;
    ss << "parameter has dimension " << y.size() << ", block map expects " << spec.dimension();
    throw DomainError(ss.str());
  }
  for (Eigen::Index k = 0; k < y.size(); ++k)
    if (!(y[k] >= -1.0 && y[k] <= 1.0)) throw DomainError("parameter outside [-1,1]^d");
}

// Block-constant matrix with the given per-coordinate values.
Eigen::MatrixXd expand_blocks(const DiffusivitySpec& spec, const Eigen::VectorXd& values) {
  const auto& part = spec.partition();
  const auto& map = spec.block_map();
  const auto k = part.k();
  std::vector<double> table(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) table[a * k + b] = values[static_cast<Eigen::Index>(map(a, b))];
  const auto n = spec.n_nodes();
  Eigen::MatrixXd c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto cj = part.community_of(j);
    for (std::size_t i = 0; i < n; ++i) c(i, j) = table[part.community_of(i) * k + cj];
  }
  return c;
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

double TimeProfile::operator()(double t) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.value; },
          [t](const Polynomial& p) {
            double acc = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * t + *it;
            return acc;
          },
          [t](const Sinusoid& s) {
            return s.offset + s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t + s.phase);
          },
      },
      kind_);
}

bool TimeProfile::is_constant() const {
  if (std::holds_alternative<Constant>(kind_)) return true;
  if (const auto* p = std::get_if<Polynomial>(&kind_)) {
    for (std::size_t i = 1; i < p->coeffs.size(); ++i)
      if (p->coeffs[i] != 0.0) return false;
    return true;
  }
  const auto& s = std::get<Sinusoid>(kind_);
  return s.amplitude == 0.0 || s.frequency == 0.0;
}

double TimeProfile::sup_abs(double horizon) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return std::abs(c.value); },
          [horizon](const Polynomial& p) {
            double acc = 0.0;
            const double t = std::max(1.0, std::abs(horizon));
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * t + std::abs(*it);
            return acc;
          },
          [](const Sinusoid& s) { return std::abs(s.offset) + std::abs(s.amplitude); },
      },
      kind_);
}

DiffusivitySpec::DiffusivitySpec(CommunityPartition partition, std::vector<TimeProfile> profiles)
    : partition_(std::move(partition)), map_(partition_.k()), profiles_(std::move(profiles)) {
  if (profiles_.empty()) profiles_.assign(map_.dimension(), TimeProfile::constant(1.0));
  if (profiles_.size() != map_.dimension())
    throw DomainError("need one time profile per parameter coordinate (K(K+1)/2)");
}

bool DiffusivitySpec::time_independent() const {
  for (const auto& p : profiles_)
    if (!p.is_constant()) return false;
  return true;
}

Eigen::VectorXd DiffusivitySpec::block_values(double t, const Eigen::Ref<const Eigen::VectorXd>& y) const {
  check_parameter(*this, y);
  Eigen::VectorXd v(y.size());
  for (Eigen::Index s = 0; s < y.size(); ++s)
    v[s] = (y[s] + 1.0) / 2.0 * profiles_[static_cast<std::size_t>(s)](t);
  return v;
}

void DiffusionProblem::validate() const {
  if (spec.n_nodes() != graph.n_nodes())
    throw DomainError("partition and graph disagree on the node count");
  if (static_cast<std::size_t>(u0.size()) != graph.n_nodes())
    throw DomainError("initial condition length must equal the node count");
  if (!u0.allFinite()) throw DomainError("initial condition must be finite");
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw DomainError("final time must be positive");
}

Eigen::VectorXd unit_initial_condition(std::size_t n_nodes, std::size_t node) {
  if (node >= n_nodes) throw DomainError("initial-condition node out of range");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_nodes));
  u[static_cast<Eigen::Index>(node)] = 1.0;
  return u;
}

Eigen::MatrixXd assemble_c(const DiffusivitySpec& spec, double t, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return expand_blocks(spec, spec.block_values(t, y));
}

Eigen::MatrixXd assemble_m(const Eigen::Ref<const Eigen::MatrixXd>& c, const Eigen::Ref<const Eigen::MatrixXd>& w) {
  if (c.rows() != c.cols() || w.rows() != w.cols() || c.rows() != w.rows())
    throw DomainError("C and W must be square matrices of the same size");
  const auto n = c.rows();
  Eigen::MatrixXd m = c.cwiseProduct(w);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != i) off += m(k, i);
    // W_ii is zero for graphs, so this is minus the off-diagonal column sum.
    m(i, i) = c(i, i) * w(i, i) - (off + m(i, i));
  }
  return m;
}

namespace {

Eigen::VectorXd solve_eigen(const Eigen::MatrixXd& m, const Eigen::VectorXd& u0, double horizon) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of M failed");
  const Eigen::VectorXd growth = (es.eigenvalues() * horizon).array().exp();
  const Eigen::VectorXd coeffs = es.eigenvectors().transpose() * u0;
  return es.eigenvectors() * growth.cwiseProduct(coeffs);
}

struct RkIntegrator {
  const DiffusionProblem& problem;
  const Eigen::VectorXd& y;
  bool constant;
  Eigen::MatrixXd fixed;  // M when the profiles are constant

  Eigen::MatrixXd operator_at(double t) const {
    if (constant) return fixed;
    return assemble_m(assemble_c(problem.spec, t, y), problem.graph.weights());
  }

  Eigen::VectorXd run(std::size_t steps) const {
    const double h = problem.final_time / static_cast<double>(steps);
    Eigen::VectorXd u = problem.u0;
    if (constant) {
      const auto& m = fixed;
      for (std::size_t s = 0; s < steps; ++s) {
        const Eigen::VectorXd k1 = m * u;
        const Eigen::VectorXd k2 = m * (u + 0.5 * h * k1);
        const Eigen::VectorXd k3 = m * (u + 0.5 * h * k2);
        const Eigen::VectorXd k4 = m * (u + h * k3);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      return u;
    }
    Eigen::MatrixXd m0 = operator_at(0.0);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = h * static_cast<double>(s);
      const Eigen::MatrixXd mh = operator_at(t + 0.5 * h);
      Eigen::MatrixXd m1 = operator_at(t + h);
      const Eigen::VectorXd k1 = m0 * u;
      const Eigen::VectorXd k2 = mh * (u + 0.5 * h * k1);
      const Eigen::VectorXd k3 = mh * (u + 0.5 * h * k2);
      const Eigen::VectorXd k4 = m1 * (u + h * k3);
      u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      m0 = std::move(m1);
    }
    return u;
  }
};

}  // namespace

DiffusionResult solve_diffusion_detailed(const DiffusionProblem& p, const Eigen::Ref<const Eigen::VectorXd>& y,
                                         const DiffusionOptions& options) {
  p.validate();
  const Eigen::VectorXd yv = y;
  const bool constant = p.spec.time_independent();
  const auto& w = p.graph.weights();

  DiffusionResult result;
  Eigen::MatrixXd m_fixed;
  if (constant) m_fixed = assemble_m(assemble_c(p.spec, 0.0, yv), w);

  // Bound on max_t ||M(t, y)||_inf from |h_s(t)| <= sup_abs.
  double norm_bound = 0.0;
  if (constant) {
    norm_bound = inf_norm(m_fixed);
  } else {
    Eigen::VectorXd sup(yv.size());
    for (Eigen::Index s = 0; s < yv.size(); ++s)
      sup[s] = (yv[s] + 1.0) / 2.0 * p.spec.profiles()[static_cast<std::size_t>(s)].sup_abs(p.final_time);
    const Eigen::MatrixXd cw = expand_blocks(p.spec, sup).cwiseProduct(w);
    norm_bound = 2.0 * (cw.rowwise().sum() - cw.diagonal()).maxCoeff();
  }

  auto fail_if_nonfinite = [&](const Eigen::VectorXd& u) {
    if (!u.allFinite()) {
      std::ostringstream ss;
      ss << "diffusion solve produced non-finite values (max ||M||_inf = " << norm_bound << ")";
      throw NumericalError(ss.str());
    }
  };

  const bool use_eigen = options.path == SolverPath::Eigen || (options.path == SolverPath::Auto && constant);
  if (use_eigen) {
    if (!constant) throw DomainError("eigendecomposition path needs time-independent profiles");
    result.u = solve_eigen(m_fixed, p.u0, p.final_time);
    result.path = SolverPath::Eigen;
    fail_if_nonfinite(result.u);
    return result;
  }

  result.path = SolverPath::RungeKutta;
  if (norm_bound == 0.0) {
    result.u = p.u0;
    result.steps = 0;
    return result;
  }
  RkIntegrator rk{p, yv, constant, std::move(m_fixed)};
  auto steps = static_cast<std::size_t>(std::ceil(p.final_time * norm_bound / options.step_factor));
  steps = std::max<std::size_t>(steps, 1);
  Eigen::VectorXd coarse = rk.run(steps);
  fail_if_nonfinite(coarse);
  for (;;) {
    if (2 * steps > options.max_steps)
      throw NumericalError("RK4 step refinement exceeded the step budget");
    Eigen::VectorXd fine = rk.run(2 * steps);
    fail_if_nonfinite(fine);
    steps *= 2;
    const double scale = std::max(fine.norm(), std::numeric_limits<double>::min());
    if ((fine - coarse).norm() <= options.rtol * scale) {
      result.u = std::move(fine);
      result.steps = steps;
      return result;
    }
    coarse = std::move(fine);
  }
}

SolutionMap::SolutionMap(DiffusionProblem problem, std::size_t node, DiffusionOptions options)
    : problem_(std::move(problem)), node_(node), options_(options) {
  problem_.validate();
  if (node_ >= problem_.graph.n_nodes()) throw DomainError("solution-map node out of range");
}

double SolutionMap::operator()(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return solve_diffusion(problem_, y, options_)[static_cast<Eigen::Index>(node_)];
}

Eigen::VectorXd SolutionMap::evaluate_rows(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                           std::size_t threads) const {
  Eigen::VectorXd out(points.rows());
  parallel_for(static_cast<std::size_t>(points.rows()), threads, [&](std::size_t i) {
    const Eigen::VectorXd y = points.row(static_cast<Eigen::Index>(i)).transpose();
    out[static_cast<Eigen::Index>(i)] = (*this)(y);
  });
  return out;
}

}  // namespace graphdiff
