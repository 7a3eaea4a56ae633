#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graphdiff/community.hpp"
#include "graphdiff/diffusion.hpp"
#include "graphdiff/errors.hpp"
#include "graphdiff/experiment.hpp"
#include "graphdiff/graph.hpp"
#include "graphdiff/polyspace.hpp"
#include "graphdiff/recovery.hpp"
#include "graphdiff/surrogate.hpp"

using namespace graphdiff;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw IoError("cannot write '" + out + "'");
  f << j.dump(2) << '\n';
}

// Points file: JSON array of rows, or whitespace-separated text, one row per line.
Eigen::MatrixXd read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  std::vector<std::vector<double>> rows;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    rows = json::parse(text).get<std::vector<std::vector<double>>>();
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#') continue;
      std::istringstream ls(line);
      std::vector<double> row;
      std::string tok;
      while (ls >> tok) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ParseError(lineno, "not a number: '" + tok + "'");
        }
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseError(i + 1, "points rows differ in length");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return pts;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct ProblemArgs {
  std::string graph;
  std::string partition;
  double final_time = 1.0;
  std::size_t u0_node = 1;
  std::string profiles;

  void add(CLI::App* app) {
    app->add_option("--graph", graph, "canonical graph JSON")->required();
    app->add_option("--partition", partition, "partition JSON {K, assignment, sizes}")->required();
    app->add_option("--T", final_time, "final time")->capture_default_str();
    app->add_option("--u0-node", u0_node, "node carrying the unit initial mass (1-based)")->capture_default_str();
    app->add_option("--profiles", profiles, "JSON file with K(K+1)/2 time profiles");
  }

  DiffusionProblem build() const {
    auto g = graph_from_json(read_json(graph));
    auto p = partition_from_json(read_json(partition));
    std::vector<TimeProfile> prof;
    if (!profiles.empty())
      for (const auto& j : read_json(profiles)) prof.push_back(profile_from_json(j));
    const auto n = g.n_nodes();
    InitialConditionSpec u0{u0_node, {}};
    DiffusionProblem problem{std::move(g), DiffusivitySpec(std::move(p), std::move(prof)), u0.build(n), final_time};
    problem.validate();
    return problem;
  }
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("not a number in list: '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse polynomial surrogates for parametric diffusion on community graphs"};
  app.require_subcommand(1);

  // gen-sbm
  auto* gen = app.add_subcommand("gen-sbm", "generate a stochastic-block-model graph");
  std::vector<std::size_t> sizes{10, 10};
  SbmSpec sbm;
  std::uint64_t seed = 1;
  std::string out;
  gen->add_option("--sizes", sizes, "community sizes")->delimiter(',')->capture_default_str();
  gen->add_option("--p-intra", sbm.p_intra)->capture_default_str();
  gen->add_option("--p-inter", sbm.p_inter)->capture_default_str();
  gen->add_option("--weight", sbm.edge_weight)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out, "output graph JSON (stdout if omitted)");
  std::string partition_out;
  gen->add_option("--partition-out", partition_out, "also write the planted partition here");

  // ingest
  auto* ing = app.add_subcommand("ingest", "read an edge-list file into a canonical graph");
  std::string edge_path;
  EdgeListOptions el;
  std::string symmetrize = "mean";
  bool unweighted = false;
  ing->add_option("path", edge_path, "edge-list file")->required();
  ing->add_flag("--unweighted", unweighted, "ignore a third column and use weight 1");
  ing->add_option("--symmetrize", symmetrize, "max | mean | sum")->capture_default_str();
  ing->add_flag("--one-indexed", el.one_indexed);
  ing->add_option("--comment-prefix", el.comment_prefix)->capture_default_str();
  ing->add_option("--out", out, "output graph JSON");

  // communities
  auto* com = app.add_subcommand("communities", "fluid community detection");
  std::string graph_path;
  std::size_t k = 2;
  FluidOptions fluid;
  com->add_option("--graph", graph_path)->required();
  com->add_option("--K", k)->capture_default_str();
  com->add_option("--seed", seed)->capture_default_str();
  com->add_option("--max-iter", fluid.max_iter)->capture_default_str();
  com->add_option("--out", out);

  // diffuse
  auto* dif = app.add_subcommand("diffuse", "solve the diffusion problem at a parameter point");
  ProblemArgs pa;
  pa.add(dif);
  std::string y_text;
  std::size_t node = 0;
  dif->add_option("--y", y_text, "comma-separated parameter point in [-1,1]^d")->required();
  dif->add_option("--node", node, "report only u_v(T) for this node (1-based)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a surrogate for u_v(T) as a function of y");
  ProblemArgs fa;
  fa.add(fit);
  std::string basis = "legendre", family = "td", method = "qcbp", model_out, report_out;
  unsigned order = 8;
  std::size_t m = 100;
  MethodParams params;
  double lambda = 0.0;
  std::size_t fit_node = 2;
  std::size_t threads = 1;
  fit->add_option("--node", fit_node, "node v (1-based)")->capture_default_str();
  fit->add_option("--basis", basis, "legendre | chebyshev")->capture_default_str();
  fit->add_option("--family", family, "td | hc")->capture_default_str();
  fit->add_option("--order", order)->capture_default_str();
  fit->add_option("--m", m, "training samples")->capture_default_str();
  fit->add_option("--method", method, "ls | qcbp | wqcbp | srlasso | wsrlasso")->capture_default_str();
  fit->add_option("--eta", params.eta)->capture_default_str();
  fit->add_option("--lambda", lambda, "SR-LASSO parameter (default 1/(8 sqrt(m)))");
  fit->add_option("--max-iter", params.solver.max_iter)->capture_default_str();
  fit->add_option("--tol", params.solver.tol)->capture_default_str();
  fit->add_flag("--allow-underdetermined", params.least_squares.allow_underdetermined,
                "minimum-norm LS when m < N");
  fit->add_option("--seed", seed)->capture_default_str();
  fit->add_option("--threads", threads)->capture_default_str();
  fit->add_option("--out", model_out, "model JSON");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate a saved model at points");
  std::string model_path, points_path;
  ev->add_option("--model", model_path)->required();
  ev->add_option("--points", points_path, "JSON rows or whitespace text")->required();
  ev->add_option("--out", out);

  // index-set
  auto* idx = app.add_subcommand("index-set", "multi-index set cardinality and order search");
  std::size_t dim = 3;
  std::size_t target = 0;
  bool list = false;
  idx->add_option("--family", family, "td | hc")->capture_default_str();
  idx->add_option("--d", dim)->capture_default_str();
  idx->add_option("--order", order)->capture_default_str();
  idx->add_option("--target", target, "find the order whose cardinality is closest to this");
  idx->add_flag("--list", list, "print the indices");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a configured sweep and append CSV rows");
  std::string config_path, csv_out;
  std::size_t exp_threads = 0;
  exp->add_option("--config", config_path, "JSON experiment config")->required();
  exp->add_option("--out", csv_out, "CSV output (overrides the config)");
  exp->add_option("--threads", exp_threads, "worker threads (overrides config and environment)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      sbm.community_sizes = sizes;
      const auto g = generate_sbm(sbm, seed);
      emit(graph_to_json(g), out);
      if (!partition_out.empty()) emit(partition_to_json(CommunityPartition::from_sizes(sizes)), partition_out);
    } else if (*ing) {
      el.weighted = !unweighted;
      el.symmetrize = parse_symmetrize(symmetrize);
      const auto r = read_edge_list_file(edge_path, el);
      emit(graph_to_json(r.graph), out);
      std::cerr << json{{"n_nodes", r.graph.n_nodes()},
                        {"edge_records", r.records},
                        {"undirected_edges", r.graph.edge_count()},
                        {"self_loops", r.self_loops}}
                       .dump()
                << '\n';
    } else if (*com) {
      const auto g = graph_from_json(read_json(graph_path));
      const auto r = fluid_communities(g, k, seed, fluid);
      auto j = partition_to_json(r.partition);
      j["sweeps"] = r.sweeps;
      j["converged"] = r.converged;
      if (!r.converged) std::cerr << "warning: fluid communities did not converge in " << r.sweeps << " sweeps\n";
      emit(j, out);
    } else if (*dif) {
      const auto p = pa.build();
      const auto y = parse_list(y_text);
      const auto res = solve_diffusion_detailed(p, Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
      json j{{"T", p.final_time}, {"path", res.path == SolverPath::Eigen ? "eigen" : "rk4"}, {"steps", res.steps}};
      if (node > 0) {
        if (node > p.graph.n_nodes()) throw DomainError("node is out of range (1-based)");
        j["node"] = node;
        j["value"] = res.u[static_cast<Eigen::Index>(node - 1)];
      } else {
        j["u"] = to_vector(res.u);
      }
      emit(j, "");
    } else if (*fit) {
      const auto p = fa.build();
      if (fit_node < 1 || fit_node > p.graph.n_nodes()) throw DomainError("node is out of range (1-based)");
      if (lambda > 0.0) params.lambda = lambda;
      const auto kind = parse_basis_kind(basis);
      const auto s = make_index_set(parse_index_family(family), p.spec.dimension(), order);
      const auto model = fit_surrogate(p, fit_node - 1, kind, s, m, parse_method(method), params, seed, threads);
      if (!model_out.empty()) emit(model_to_json(model), model_out);
      const auto& md = model.metadata;
      emit(json{{"method", to_string(md.method)},
                {"N", s.size()},
                {"m", md.m},
                {"iterations", md.iterations},
                {"converged", md.converged},
                {"residual_norm", md.residual_norm}},
           "");
    } else if (*ev) {
      const auto model = model_from_json(read_json(model_path));
      const auto pts = read_points(points_path);
      if (pts.rows() > 0 && static_cast<std::size_t>(pts.cols()) != model.index_set.dimension())
        throw DomainError("points must have d = " + std::to_string(model.index_set.dimension()) + " columns");
      emit(json(to_vector(evaluate(model, pts))), out);
    } else if (*idx) {
      const auto fam = parse_index_family(family);
      if (target > 0) order = order_for_cardinality(fam, dim, target);
      const auto s = make_index_set(fam, dim, order);
      json j{{"family", to_string(fam)}, {"d", dim}, {"order", order}, {"cardinality", s.size()}};
      if (list) j["indices"] = index_set_to_json(s);
      emit(j, "");
    } else if (*exp) {
      auto cfg = load_config(config_path);
      apply_environment(cfg);
      if (!csv_out.empty()) cfg.output = csv_out;
      if (exp_threads > 0) cfg.threads = exp_threads;
      if (cfg.output.empty()) cfg.output = cfg.experiment_id + ".csv";
      const auto result = run_experiment(cfg);
      append_csv(cfg.output, result.rows);
      if (!result.community_sizes.empty()) {
        std::cerr << "dataset: " << result.dataset_nodes << " nodes, " << result.dataset_edges
                  << " edge records; community sizes";
        for (auto sz : result.community_sizes) std::cerr << ' ' << sz;
        std::cerr << '\n';
      }
      std::size_t failed = 0;
      for (const auto& r : result.records)
        if (r.failed) {
          if (failed++ < 10)
            std::cerr << "failed: " << to_string(r.method) << " m=" << r.m << " repeat=" << r.repeat << ": " << r.error
                      << '\n';
        }
      std::cerr << result.rows.size() << " rows appended to " << cfg.output << "; " << failed << " failed cells\n";
      return result.all_succeeded() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
