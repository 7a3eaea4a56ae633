#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphdiff/community.hpp"
#include "graphdiff/diffusion.hpp"
#include "graphdiff/errors.hpp"
#include "graphdiff/experiment.hpp"
#include "graphdiff/graph.hpp"
#include "graphdiff/polyspace.hpp"
#include "graphdiff/recovery.hpp"
#include "graphdiff/surrogate.hpp"

namespace py = pybind11;
using namespace graphdiff;

namespace {

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["solution"] = r.solution;
  d["iterations"] = r.iterations;
  d["residual_norm"] = r.residual_norm;
  d["objective"] = r.objective;
  d["converged"] = r.converged;
  d["warning"] = r.warning;
  return d;
}

SolverConfig solver_cfg(std::size_t max_iter, double tol) { return SolverConfig{max_iter, tol}; }

SolverPath parse_path(const std::string& s) {
  if (s == "auto") return SolverPath::Auto;
  if (s == "eigen") return SolverPath::Eigen;
  if (s == "rk4") return SolverPath::RungeKutta;
  throw InvalidSpecError("path must be auto, eigen or rk4");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse polynomial surrogates for parametric diffusion on community graphs";

  py::register_exception<Error>(m, "GraphdiffError", PyExc_ValueError);

  py::class_<WeightedGraph>(m, "WeightedGraph")
      .def(py::init([](const Eigen::MatrixXd& w) { return WeightedGraph(w); }), py::arg("weights"))
      .def_property_readonly("n_nodes", &WeightedGraph::n_nodes)
      .def_property_readonly("weights", &WeightedGraph::weights)
      .def_property_readonly("labels", &WeightedGraph::labels)
      .def("edge_count", &WeightedGraph::edge_count)
      .def("is_connected", &WeightedGraph::is_connected)
      .def("to_json", [](const WeightedGraph& g) { return graph_to_json(g).dump(); })
      .def_static("from_json", [](const std::string& s) { return graph_from_json(nlohmann::json::parse(s)); });

  m.def(
      "generate_sbm",
      [](std::vector<std::size_t> sizes, double p_intra, double p_inter, double edge_weight, std::uint64_t seed) {
        return generate_sbm(SbmSpec{std::move(sizes), p_intra, p_inter, edge_weight}, seed);
      },
      py::arg("community_sizes"), py::arg("p_intra") = 1.0, py::arg("p_inter") = 0.0, py::arg("edge_weight") = 1.0,
      py::arg("seed") = 1);
  m.def("laplacian", &laplacian, py::arg("graph"), py::arg("weighted") = true);
  m.def(
      "parse_edge_list",
      [](const std::string& text, bool weighted, const std::string& symmetrize, bool one_indexed,
         const std::string& comment_prefix) {
        EdgeListOptions o{weighted, parse_symmetrize(symmetrize), one_indexed, comment_prefix};
        auto r = read_edge_list(text, o);
        return py::make_tuple(std::move(r.graph), r.records);
      },
      py::arg("text"), py::arg("weighted") = true, py::arg("symmetrize") = "mean", py::arg("one_indexed") = false,
      py::arg("comment_prefix") = "#", "Returns (graph, edge_records).");

  py::class_<CommunityPartition>(m, "CommunityPartition")
      .def(py::init<std::vector<std::size_t>, std::size_t>(), py::arg("assignment"), py::arg("k"))
      .def_static("from_sizes", &CommunityPartition::from_sizes)
      .def_property_readonly("k", &CommunityPartition::k)
      .def_property_readonly("n_nodes", &CommunityPartition::n_nodes)
      .def_property_readonly("assignment", &CommunityPartition::assignment)
      .def("sizes", &CommunityPartition::sizes);
  m.def("block_index", [](std::size_t k, std::size_t i, std::size_t j) { return BlockIndexMap(k)(i, j); },
        py::arg("k"), py::arg("i"), py::arg("j"), "0-based coordinate of the community pair (i, j).");
  m.def(
      "fluid_communities",
      [](const WeightedGraph& g, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
        return fluid_communities(g, k, seed, FluidOptions{max_iter}).partition;
      },
      py::arg("graph"), py::arg("k"), py::arg("seed") = 1, py::arg("max_iter") = 100);

  py::class_<DiffusionProblem>(m, "DiffusionProblem")
      .def(py::init([](WeightedGraph g, CommunityPartition p, std::optional<Eigen::VectorXd> u0, double t) {
             const auto n = g.n_nodes();
             DiffusionProblem problem{std::move(g), DiffusivitySpec(std::move(p)),
                                      u0 ? *u0 : unit_initial_condition(n, 0), t};
             problem.validate();
             return problem;
           }),
           py::arg("graph"), py::arg("partition"), py::arg("u0") = py::none(), py::arg("T") = 1.0)
      .def_property_readonly("dimension", [](const DiffusionProblem& p) { return p.spec.dimension(); })
      .def_property_readonly("n_nodes", [](const DiffusionProblem& p) { return p.graph.n_nodes(); })
      .def_readonly("u0", &DiffusionProblem::u0)
      .def_readonly("T", &DiffusionProblem::final_time);

  m.def("assemble_c", [](const DiffusionProblem& p, const Eigen::VectorXd& y, double t) { return assemble_c(p.spec, t, y); },
        py::arg("problem"), py::arg("y"), py::arg("t") = 0.0);
  m.def("assemble_m", [](const Eigen::MatrixXd& c, const Eigen::MatrixXd& w) { return assemble_m(c, w); });
  m.def(
      "solve_diffusion",
      [](const DiffusionProblem& p, const Eigen::VectorXd& y, const std::string& path) {
        DiffusionOptions o;
        o.path = parse_path(path);
        return solve_diffusion(p, y, o);
      },
      py::arg("problem"), py::arg("y"), py::arg("path") = "auto");
  m.def(
      "solution_values",
      [](const DiffusionProblem& p, std::size_t node, const Eigen::MatrixXd& points, std::size_t threads) {
        return SolutionMap(p, node).evaluate_rows(points, threads);
      },
      py::arg("problem"), py::arg("node"), py::arg("points"), py::arg("threads") = 1,
      "u_node(T) at each row of points (node is 0-based).");

  py::class_<MultiIndexSet>(m, "MultiIndexSet")
      .def_property_readonly("dimension", &MultiIndexSet::dimension)
      .def_property_readonly("order", &MultiIndexSet::order)
      .def("__len__", &MultiIndexSet::size)
      .def("indices", [](const MultiIndexSet& s) { return std::vector<MultiIndex>(s.begin(), s.end()); })
      .def("position", &MultiIndexSet::position)
      .def("is_lower", [](const MultiIndexSet& s) { return is_lower(s); });
  m.def("total_degree_set", &total_degree_set, py::arg("d"), py::arg("n"));
  m.def("hyperbolic_cross_set", &hyperbolic_cross_set, py::arg("d"), py::arg("n"));
  m.def("total_degree_cardinality", &total_degree_cardinality, py::arg("d"), py::arg("n"));
  m.def(
      "order_for_cardinality",
      [](const std::string& family, std::size_t d, std::size_t target) {
        return order_for_cardinality(parse_index_family(family), d, target);
      },
      py::arg("family"), py::arg("d"), py::arg("target"));
  m.def(
      "eval_basis",
      [](const std::string& kind, const MultiIndexSet& s, const Eigen::MatrixXd& pts) {
        return eval_basis(parse_basis_kind(kind), s, pts);
      },
      py::arg("basis"), py::arg("index_set"), py::arg("points"));
  m.def(
      "intrinsic_weights",
      [](const std::string& kind, const MultiIndexSet& s) { return intrinsic_weights(parse_basis_kind(kind), s); },
      py::arg("basis"), py::arg("index_set"));
  m.def(
      "sample_measure",
      [](const std::string& kind, std::size_t d, std::size_t count, std::uint64_t seed) {
        return sample_measure(parse_basis_kind(kind), d, count, seed);
      },
      py::arg("basis"), py::arg("d"), py::arg("m"), py::arg("seed"));

  m.def(
      "solve_least_squares",
      [](const Eigen::MatrixXd& psi, const Eigen::VectorXd& b, bool allow_underdetermined) {
        LeastSquaresOptions o;
        o.allow_underdetermined = allow_underdetermined;
        return report_dict(solve_least_squares(psi, b, o));
      },
      py::arg("psi"), py::arg("b"), py::arg("allow_underdetermined") = false);
  m.def(
      "solve_qcbp",
      [](const Eigen::MatrixXd& psi, const Eigen::VectorXd& b, double eta, std::optional<Eigen::VectorXd> w,
         std::size_t max_iter, double tol) {
        return report_dict(solve_qcbp(psi, b, eta, w.value_or(Eigen::VectorXd{}), solver_cfg(max_iter, tol)));
      },
      py::arg("psi"), py::arg("b"), py::arg("eta"), py::arg("weights") = py::none(), py::arg("max_iter") = 5000,
      py::arg("tol") = 1e-8);
  m.def(
      "solve_srlasso",
      [](const Eigen::MatrixXd& psi, const Eigen::VectorXd& b, double lambda, std::optional<Eigen::VectorXd> w,
         std::size_t max_iter, double tol) {
        return report_dict(solve_srlasso(psi, b, lambda, w.value_or(Eigen::VectorXd{}), solver_cfg(max_iter, tol)));
      },
      py::arg("psi"), py::arg("b"), py::arg("lam"), py::arg("weights") = py::none(), py::arg("max_iter") = 5000,
      py::arg("tol") = 1e-8);

  py::class_<SurrogateModel>(m, "SurrogateModel")
      .def_readonly("coefficients", &SurrogateModel::coefficients)
      .def_readonly("index_set", &SurrogateModel::index_set)
      .def("evaluate", [](const SurrogateModel& s, const Eigen::MatrixXd& pts) { return evaluate(s, pts); })
      .def("to_json", [](const SurrogateModel& s) { return model_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& s) { return model_from_json(nlohmann::json::parse(s)); })
      .def_property_readonly("iterations", [](const SurrogateModel& s) { return s.metadata.iterations; })
      .def_property_readonly("converged", [](const SurrogateModel& s) { return s.metadata.converged; });
  m.def(
      "fit_surrogate",
      [](const DiffusionProblem& p, std::size_t node, const std::string& basis, const MultiIndexSet& s, std::size_t count,
         const std::string& method, std::uint64_t seed, double eta, std::optional<double> lambda,
         std::size_t max_iter, bool allow_underdetermined, std::size_t threads) {
        MethodParams params;
        params.eta = eta;
        params.lambda = lambda;
        params.solver.max_iter = max_iter;
        params.least_squares.allow_underdetermined = allow_underdetermined;
        return fit_surrogate(p, node, parse_basis_kind(basis), s, count, parse_method(method), params, seed, threads);
      },
      py::arg("problem"), py::arg("node"), py::arg("basis"), py::arg("index_set"), py::arg("m"), py::arg("method"),
      py::arg("seed"), py::arg("eta") = 1e-8, py::arg("lam") = py::none(), py::arg("max_iter") = 5000,
      py::arg("allow_underdetermined") = false, py::arg("threads") = 1);
  m.def("rmse", [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return rmse(a, b); });
  m.def("best_s_term_error", [](const Eigen::VectorXd& c, std::size_t s, double q) { return best_s_term_error(c, s, q); },
        py::arg("c"), py::arg("s"), py::arg("q") = 2.0);
  m.def("geometric_stats", [](const std::vector<double>& v) {
    const auto g = geometric_stats(v);
    return py::make_tuple(g.mean, g.stddev);
  });

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg = config_from_json(nlohmann::json::parse(config_json));
        const auto result = run_experiment(cfg);
        py::list rows;
        for (const auto& r : result.rows) {
          py::dict d;
          d["experiment_id"] = r.experiment_id;
          d["method"] = std::string(to_string(r.method));
          d["basis"] = std::string(to_string(r.basis));
          d["index_family"] = std::string(to_string(r.family));
          d["order"] = r.order;
          d["cardinality"] = r.cardinality;
          d["d"] = r.d;
          d["n_nodes"] = r.n_nodes;
          d["m"] = r.m;
          d["repeats"] = r.repeats;
          d["rmse_geomean"] = r.rmse_geomean;
          d["rmse_geostd"] = r.rmse_geostd;
          d["mean_runtime_s"] = r.mean_runtime_s;
          d["failures"] = r.failures;
          d["status"] = r.status;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_json"), "Runs a sweep from a JSON config string; returns aggregated rows.");
}
