#include "graphdiff/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "graphdiff/errors.hpp"

namespace graphdiff {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::LeastSquares: return "ls";
    case Method::Qcbp: return "qcbp";
    case Method::WeightedQcbp: return "wqcbp";
    case Method::SrLasso: return "srlasso";
    case Method::WeightedSrLasso: return "wsrlasso";
  }
  return "ls";
}

Method parse_method(std::string_view name) {
  if (name == "ls") return Method::LeastSquares;
  if (name == "qcbp") return Method::Qcbp;
  if (name == "wqcbp") return Method::WeightedQcbp;
  if (name == "srlasso") return Method::SrLasso;
  if (name == "wsrlasso") return Method::WeightedSrLasso;
  throw InvalidSpecError("unknown method '" + std::string(name) + "'");
}

bool is_weighted(Method m) { return m == Method::WeightedQcbp || m == Method::WeightedSrLasso; }

double default_lambda(std::size_t m) { return 1.0 / (8.0 * std::sqrt(static_cast<double>(m))); }

void SurrogateModel::validate() const {
  if (static_cast<std::size_t>(coefficients.size()) != index_set.size())
    throw DomainError("coefficient count must equal the index-set size");
}

SolverReport run_decoder(const MeasurementSystem& sys, Method method, const MethodParams& params) {
  const Eigen::VectorXd weights =
      is_weighted(method) ? intrinsic_weights(sys.basis, sys.index_set) : Eigen::VectorXd{};
  switch (method) {
    case Method::LeastSquares: return solve_least_squares(sys, params.least_squares);
    case Method::Qcbp:
    case Method::WeightedQcbp: return solve_qcbp(sys, params.eta, weights, params.solver);
    case Method::SrLasso:
    case Method::WeightedSrLasso:
      return solve_srlasso(sys, params.lambda.value_or(default_lambda(sys.rows())), weights, params.solver);
  }
  throw InvalidSpecError("unknown method");
}

SurrogateModel fit_from_samples(BasisKind basis, const MultiIndexSet& s, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                const Eigen::Ref<const Eigen::VectorXd>& values, Method method,
                                const MethodParams& params, const std::optional<Eigen::VectorXd>& noise) {
  const auto sys = build_system(basis, s, points, values, noise);
  const auto report = run_decoder(sys, method, params);
  SurrogateModel model{basis, s, report.solution, {}};
  model.metadata.method = method;
  model.metadata.m = static_cast<std::size_t>(points.rows());
  model.metadata.iterations = report.iterations;
  model.metadata.converged = report.converged;
  model.metadata.residual_norm = report.residual_norm;
  return model;
}

SurrogateModel fit_surrogate(const DiffusionProblem& p, std::size_t node, BasisKind basis, const MultiIndexSet& s,
                             std::size_t m, Method method, const MethodParams& params, std::uint64_t seed,
                             std::size_t threads) {
  if (m < 1) throw DomainError("need at least one training sample");
  const SolutionMap f(p, node);
  if (s.dimension() != f.dimension()) throw DomainError("index-set dimension must equal K(K+1)/2");
  const Eigen::MatrixXd points = sample_measure(basis, s.dimension(), m, seed);
  const Eigen::VectorXd values = f.evaluate_rows(points, threads);
  auto model = fit_from_samples(basis, s, points, values, method, params);
  model.metadata.seed = seed;
  model.metadata.node = node;
  model.metadata.final_time = p.final_time;
  return model;
}

TestSet make_test_set(const SolutionMap& f, std::size_t m_test, std::uint64_t seed, std::size_t threads) {
  TestSet t;
  t.points = sample_measure(BasisKind::Legendre, f.dimension(), m_test, seed);
  t.values = f.evaluate_rows(t.points, threads);
  return t;
}

Eigen::VectorXd evaluate(const SurrogateModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  model.validate();
  if (points.rows() == 0) return Eigen::VectorXd(0);
  return eval_basis(model.basis, model.index_set, points) * model.coefficients;
}

double rmse(const Eigen::Ref<const Eigen::VectorXd>& predicted, const Eigen::Ref<const Eigen::VectorXd>& actual) {
  if (predicted.size() != actual.size()) throw DomainError("prediction and value counts differ");
  if (actual.size() == 0) throw DomainError("RMSE needs at least one test point");
  return std::sqrt((predicted - actual).squaredNorm() / static_cast<double>(actual.size()));
}

double rmse(const SurrogateModel& model, const TestSet& test) {
  return rmse(evaluate(model, test.points), test.values);
}

double best_s_term_error(const Eigen::Ref<const Eigen::VectorXd>& c, std::size_t s, double q) {
  if (!(q > 0.0)) throw DomainError("best s-term error needs q > 0");
  const auto n = static_cast<std::size_t>(c.size());
  if (s >= n) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(c[static_cast<Eigen::Index>(a)]) > std::abs(c[static_cast<Eigen::Index>(b)]);
  });
  if (std::isinf(q)) return std::abs(c[static_cast<Eigen::Index>(order[s])]);
  double acc = 0.0;
  for (std::size_t r = s; r < n; ++r) acc += std::pow(std::abs(c[static_cast<Eigen::Index>(order[r])]), q);
  return std::pow(acc, 1.0 / q);
}

nlohmann::json model_to_json(const SurrogateModel& model) {
  model.validate();
  const auto& md = model.metadata;
  return {{"basis", to_string(model.basis)},
          {"index_family", to_string(model.index_set.family())},
          {"order", model.index_set.order()},
          {"index_set", index_set_to_json(model.index_set)},
          {"coefficients",
           std::vector<double>(model.coefficients.data(), model.coefficients.data() + model.coefficients.size())},
          {"metadata",
           {{"method", to_string(md.method)},
            {"m", md.m},
            {"seed", md.seed},
            {"node", md.node + 1},
            {"T", md.final_time},
            {"iterations", md.iterations},
            {"converged", md.converged},
            {"residual_norm", md.residual_norm}}}};
}

SurrogateModel model_from_json(const nlohmann::json& j) {
  try {
    const auto indices = j.at("index_set").get<std::vector<MultiIndex>>();
    if (indices.empty()) throw DomainError("model has an empty index set");
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    if (coeffs.size() != indices.size()) throw DomainError("coefficient count must equal the index-set size");
    const auto d = indices.front().size();
    const auto family = j.contains("index_family") ? parse_index_family(j["index_family"].get<std::string>())
                                                   : IndexFamily::Explicit;
    const auto order = j.value("order", 0u);
    SurrogateModel model{parse_basis_kind(j.at("basis").get<std::string>()),
                         MultiIndexSet(d, indices, family, order),
                         Eigen::VectorXd(static_cast<Eigen::Index>(coeffs.size())),
                         {}};
    // The set is stored sorted; carry each coefficient to its index's slot.
    for (std::size_t i = 0; i < indices.size(); ++i)
      model.coefficients[static_cast<Eigen::Index>(model.index_set.position(indices[i]))] = coeffs[i];
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      auto& md = model.metadata;
      md.method = parse_method(m.value("method", std::string("ls")));
      md.m = m.value("m", std::size_t{0});
      md.seed = m.value("seed", std::uint64_t{0});
      md.node = m.value("node", std::size_t{1}) - 1;
      md.final_time = m.value("T", 1.0);
      md.iterations = m.value("iterations", std::size_t{0});
      md.converged = m.value("converged", true);
      md.residual_norm = m.value("residual_norm", 0.0);
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("model JSON: ") + e.what());
  }
}

}  // namespace graphdiff
