#include "graphdiff/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "graphdiff/errors.hpp"
#include "graphdiff/parallel.hpp"
#include "graphdiff/random.hpp"

namespace graphdiff {

std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::SampleCount: return "m";
    case SweepKind::Cardinality: return "cardinality";
    case SweepKind::Dimension: return "dimension";
    case SweepKind::Size: return "size";
    case SweepKind::Dataset: return "dataset";
  }
  return "m";
}

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "m") return SweepKind::SampleCount;
  if (name == "cardinality") return SweepKind::Cardinality;
  if (name == "dimension") return SweepKind::Dimension;
  if (name == "size") return SweepKind::Size;
  if (name == "dataset") return SweepKind::Dataset;
  throw ConfigError("unknown sweep '" + std::string(name) + "'");
}

Eigen::VectorXd InitialConditionSpec::build(std::size_t n_nodes) const {
  if (!values.empty()) {
    if (values.size() != n_nodes) throw ConfigError("u0 values must have one entry per node");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  if (node < 1 || node > n_nodes) throw ConfigError("u0 node is out of range (1-based)");
  return unit_initial_condition(n_nodes, node - 1);
}

namespace {

template <typename T>
void require_increasing(const std::vector<T>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if constexpr (std::is_unsigned_v<T>) {
      if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be increasing");
    } else {
      if (!(v[i] > 0) || (i > 0 && !(v[i] > v[i - 1])))
        throw ConfigError(std::string(what) + " must be positive and increasing");
    }
  }
}

template <typename T>
void require_positive_increasing(const std::vector<T>& v, const char* what) {
  require_increasing(v, what);
  if (!v.empty() && v.front() == 0) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (test_size < 1) throw ConfigError("test_size must be at least 1");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (node < 1) throw ConfigError("node is 1-based and must be at least 1");
  if (!(final_time > 0.0)) throw ConfigError("T must be positive");
  if (k < 1) throw ConfigError("K must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  require_positive_increasing(m_values, "m_values");
  switch (sweep) {
    case SweepKind::SampleCount:
    case SweepKind::Dataset:
      if (m_values.empty()) throw ConfigError("m_values is required");
      if (sweep == SweepKind::Dataset && !dataset) throw ConfigError("dataset sweep needs a dataset section");
      break;
    case SweepKind::Cardinality:
      if (orders.empty()) throw ConfigError("cardinality sweep needs orders");
      require_increasing(orders, "orders");
      if (fixed_m < 1) throw ConfigError("fixed_m must be positive");
      break;
    case SweepKind::Dimension:
      if (communities_list.empty()) throw ConfigError("dimension sweep needs communities_list");
      require_positive_increasing(communities_list, "communities_list");
      if (m_values.empty()) throw ConfigError("m_values is required");
      for (auto kk : communities_list)
        if (total_nodes % kk != 0)
          throw ConfigError("total_nodes = " + std::to_string(total_nodes) + " is not divisible into " +
                            std::to_string(kk) + " equal communities");
      if (!dimension_orders.empty() && dimension_orders.size() != communities_list.size())
        throw ConfigError("dimension_orders needs one order per K");
      if (dimension_orders.empty() && target_cardinalities.size() != 1 &&
          target_cardinalities.size() != communities_list.size())
        throw ConfigError("dimension sweep needs dimension_orders or target_cardinalities");
      break;
    case SweepKind::Size:
      if (nodes_per_community.empty()) throw ConfigError("size sweep needs nodes_per_community");
      require_positive_increasing(nodes_per_community, "nodes_per_community");
      if (m_values.empty()) throw ConfigError("m_values is required");
      break;
  }
}

TimeProfile profile_from_json(const nlohmann::json& j) {
  if (j.is_number()) return TimeProfile::constant(j.get<double>());
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return TimeProfile::constant(j.value("value", 1.0));
  if (kind == "polynomial") return TimeProfile(TimeProfile::Polynomial{j.at("coeffs").get<std::vector<double>>()});
  if (kind == "sinusoid")
    return TimeProfile(TimeProfile::Sinusoid{j.value("amplitude", 0.0), j.value("frequency", 0.0),
                                             j.value("phase", 0.0), j.value("offset", 1.0)});
  throw ConfigError("unknown time profile kind '" + kind + "'");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{
      "experiment_id", "sweep",   "graph",        "dataset",          "K",
      "node",          "T",       "u0",           "profiles",         "basis",
      "index_set",     "methods", "m_values",     "repeats",          "test_size",
      "master_seed",   "solver",  "orders",       "fixed_m",          "communities_list",
      "total_nodes",   "dimension_orders",        "target_cardinalities",
      "nodes_per_community",      "threads",      "output"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  try {
    c.experiment_id = j.value("experiment_id", c.experiment_id);
    if (j.contains("sweep")) c.sweep = parse_sweep_kind(j["sweep"].get<std::string>());
    if (j.contains("graph")) {
      const auto& g = j["graph"];
      if (g.contains("sbm")) {
        const auto& s = g["sbm"];
        c.sbm.community_sizes = s.value("community_sizes", c.sbm.community_sizes);
        c.sbm.p_intra = s.value("p_intra", c.sbm.p_intra);
        c.sbm.p_inter = s.value("p_inter", c.sbm.p_inter);
        c.sbm.edge_weight = s.value("edge_weight", c.sbm.edge_weight);
      }
      c.graph_seed = g.value("seed", c.graph_seed);
    }
    c.k = j.value("K", c.sbm.community_sizes.size());
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      DatasetSource src;
      src.path = d.at("path").get<std::string>();
      src.options.weighted = d.value("weighted", true);
      src.options.symmetrize = parse_symmetrize(d.value("symmetrize", std::string("mean")));
      src.options.one_indexed = d.value("one_indexed", false);
      src.options.comment_prefix = d.value("comment_prefix", std::string("#"));
      if (d.contains("expected_nodes")) src.expected_nodes = d["expected_nodes"].get<std::size_t>();
      if (d.contains("expected_edges")) src.expected_edges = d["expected_edges"].get<std::size_t>();
      src.community_seed = d.value("community_seed", src.community_seed);
      src.fluid_max_iter = d.value("fluid_max_iter", src.fluid_max_iter);
      c.dataset = std::move(src);
    }
    c.node = j.value("node", c.node);
    c.final_time = j.value("T", c.final_time);
    if (j.contains("u0")) {
      const auto& u = j["u0"];
      c.u0.node = u.value("node", c.u0.node);
      c.u0.values = u.value("values", std::vector<double>{});
    }
    if (j.contains("profiles"))
      for (const auto& p : j["profiles"]) c.profiles.push_back(profile_from_json(p));
    if (j.contains("basis")) c.basis = parse_basis_kind(j["basis"].get<std::string>());
    if (j.contains("index_set")) {
      const auto& s = j["index_set"];
      if (s.contains("family")) c.family = parse_index_family(s["family"].get<std::string>());
      c.order = s.value("order", c.order);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    c.m_values = j.value("m_values", c.m_values);
    c.repeats = j.value("repeats", c.repeats);
    c.test_size = j.value("test_size", c.test_size);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.params.eta = s.value("eta", c.params.eta);
      if (s.contains("lambda") && !s["lambda"].is_null()) c.params.lambda = s["lambda"].get<double>();
      c.params.solver.max_iter = s.value("max_iter", c.params.solver.max_iter);
      c.params.solver.tol = s.value("tol", c.params.solver.tol);
      c.params.least_squares.max_condition = s.value("max_condition", c.params.least_squares.max_condition);
      c.params.least_squares.allow_underdetermined =
          s.value("allow_underdetermined", c.params.least_squares.allow_underdetermined);
    }
    c.orders = j.value("orders", c.orders);
    c.fixed_m = j.value("fixed_m", c.fixed_m);
    c.communities_list = j.value("communities_list", c.communities_list);
    c.total_nodes = j.value("total_nodes", c.total_nodes);
    c.dimension_orders = j.value("dimension_orders", c.dimension_orders);
    c.target_cardinalities = j.value("target_cardinalities", c.target_cardinalities);
    c.nodes_per_community = j.value("nodes_per_community", c.nodes_per_community);
    c.threads = j.value("threads", c.threads);
    c.output = j.value("output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidSpecError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config '") + path + "': " + e.what());
  }
  return config_from_json(j);
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv("GRAPHDIFF_OUTPUT_DIR"); dir && *dir) {
    const auto name = cfg.output.empty() ? cfg.experiment_id + ".csv"
                                         : std::filesystem::path(cfg.output).filename().string();
    cfg.output = (std::filesystem::path(dir) / name).string();
  }
  if (const char* t = std::getenv("GRAPHDIFF_THREADS"); t && *t) {
    char* end = nullptr;
    const auto v = std::strtoul(t, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError("GRAPHDIFF_THREADS must be a positive integer");
    cfg.threads = v;
  }
}

bool ExperimentResult::all_succeeded() const {
  for (const auto& r : records)
    if (r.failed) return false;
  return true;
}

GeometricStats geometric_stats(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) logs.push_back(std::log(std::max(v, std::numeric_limits<double>::min())));
  double mean = 0.0;
  for (double l : logs) mean += l;
  mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double l : logs) var += (l - mean) * (l - mean);
  var /= static_cast<double>(logs.size());
  return {std::exp(mean), std::exp(std::sqrt(var))};
}

std::uint64_t cell_seed(std::uint64_t master, Method method, std::size_t m, std::size_t repeat) {
  return derive_seed({master, hash_string(to_string(method)), m, repeat});
}

std::uint64_t test_seed(std::uint64_t master, std::size_t repeat) {
  return derive_seed({master, hash_string("test"), repeat});
}

DiffusionProblem sbm_problem(const SbmSpec& sbm, std::uint64_t graph_seed, const ExperimentConfig& cfg) {
  auto graph = generate_sbm(sbm, graph_seed);
  auto partition = CommunityPartition::from_sizes(sbm.community_sizes);
  const auto n = graph.n_nodes();
  std::vector<TimeProfile> profiles = cfg.profiles;
  const auto d = partition.k() * (partition.k() + 1) / 2;
  if (!profiles.empty() && profiles.size() != d)
    throw ConfigError("profiles must list K(K+1)/2 = " + std::to_string(d) + " entries");
  DiffusivitySpec spec(std::move(partition), std::move(profiles));
  return DiffusionProblem{std::move(graph), std::move(spec), cfg.u0.build(n), cfg.final_time};
}

ExperimentResult run_points(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                            const std::vector<std::size_t>& m_values) {
  cfg.validate();
  std::vector<SolutionMap> maps;
  maps.reserve(points.size());
  for (const auto& p : points) {
    if (p.node >= p.problem.graph.n_nodes()) throw ConfigError("node is out of range for the graph");
    if (p.index_set.dimension() != p.problem.spec.dimension())
      throw ConfigError("index-set dimension does not match K(K+1)/2");
    maps.emplace_back(p.problem, p.node);
  }

  const auto repeats = cfg.repeats;
  std::vector<TestSet> tests(points.size() * repeats);
  parallel_for(tests.size(), cfg.threads, [&](std::size_t i) {
    const auto p = i / repeats;
    const auto r = i % repeats;
    tests[i] = make_test_set(maps[p], cfg.test_size, test_seed(cfg.master_seed, r));
  });

  std::vector<RunRecord> records;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (auto method : cfg.methods)
      for (auto m : m_values)
        for (std::size_t r = 0; r < repeats; ++r) {
          RunRecord rec;
          rec.point = p;
          rec.method = method;
          rec.m = m;
          rec.repeat = r;
          rec.seed = cell_seed(cfg.master_seed, method, m, r);
          records.push_back(rec);
        }

  parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
    auto& rec = records[i];
    const auto& pt = points[rec.point];
    const auto n_terms = pt.index_set.size();
    if (rec.method == Method::LeastSquares && rec.m < n_terms && !cfg.params.least_squares.allow_underdetermined) {
      rec.skipped = true;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto d = pt.index_set.dimension();
      const Eigen::MatrixXd samples = sample_measure(cfg.basis, d, rec.m, rec.seed);
      const Eigen::VectorXd values = maps[rec.point].evaluate_rows(samples);
      const auto model = fit_from_samples(cfg.basis, pt.index_set, samples, values, rec.method, cfg.params);
      rec.rmse = rmse(model, tests[rec.point * repeats + rec.repeat]);
      rec.iterations = model.metadata.iterations;
      rec.converged = model.metadata.converged;
      if (!std::isfinite(rec.rmse)) {
        rec.failed = true;
        rec.error = "non-finite RMSE";
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  ExperimentResult result;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<const RunRecord*>> cells;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> order;
  for (const auto& rec : records) {
    const auto method_pos = static_cast<std::size_t>(
        std::find(cfg.methods.begin(), cfg.methods.end(), rec.method) - cfg.methods.begin());
    const auto key = std::make_tuple(rec.point, method_pos, rec.m);
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&rec);
  }
  for (const auto& key : order) {
    const auto& group = cells[key];
    const auto& pt = points[std::get<0>(key)];
    AggregateRow row;
    row.experiment_id = cfg.experiment_id;
    row.method = group.front()->method;
    row.basis = cfg.basis;
    row.family = pt.index_set.family();
    row.order = pt.index_set.order();
    row.cardinality = pt.index_set.size();
    row.d = pt.index_set.dimension();
    row.n_nodes = pt.problem.graph.n_nodes();
    row.m = std::get<2>(key);
    row.repeats = group.size();
    std::vector<double> ok;
    double runtime = 0.0;
    std::size_t skipped = 0;
    for (const auto* rec : group) {
      if (rec->skipped) {
        ++skipped;
      } else if (rec->failed) {
        ++row.failures;
      } else {
        ok.push_back(rec->rmse);
        runtime += rec->wall_time_s;
      }
    }
    const auto stats = geometric_stats(ok);
    row.rmse_geomean = stats.mean;
    row.rmse_geostd = stats.stddev;
    row.mean_runtime_s = ok.empty() ? 0.0 : runtime / static_cast<double>(ok.size());
    if (skipped == group.size()) row.status = "skipped";
    else if (ok.empty()) row.status = "failed";
    else if (row.failures > 0) row.status = "partial";
    else row.status = "ok";
    result.rows.push_back(std::move(row));
  }
  result.records = std::move(records);
  return result;
}

namespace {

SweepPoint make_point(DiffusionProblem problem, const ExperimentConfig& cfg, MultiIndexSet s) {
  if (cfg.node > problem.graph.n_nodes()) throw ConfigError("node is out of range for the graph");
  return SweepPoint{std::move(problem), cfg.node - 1, std::move(s)};
}

std::string sbm_checked(const ExperimentConfig& cfg) {
  if (cfg.sbm.community_sizes.size() != cfg.k)
    return "K = " + std::to_string(cfg.k) + " does not match the SBM community count";
  return {};
}

}  // namespace

ExperimentResult run_m_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (auto msg = sbm_checked(cfg); !msg.empty()) throw ConfigError(msg);
  auto problem = sbm_problem(cfg.sbm, cfg.graph_seed, cfg);
  const auto d = problem.spec.dimension();
  std::vector<SweepPoint> points;
  points.push_back(make_point(std::move(problem), cfg, make_index_set(cfg.family, d, cfg.order)));
  return run_points(cfg, points, cfg.m_values);
}

ExperimentResult run_cardinality_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (auto msg = sbm_checked(cfg); !msg.empty()) throw ConfigError(msg);
  const auto problem = sbm_problem(cfg.sbm, cfg.graph_seed, cfg);
  const auto d = problem.spec.dimension();
  std::vector<SweepPoint> points;
  for (auto n : cfg.orders) points.push_back(make_point(problem, cfg, make_index_set(cfg.family, d, n)));
  return run_points(cfg, points, {cfg.fixed_m});
}

ExperimentResult run_dimension_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < cfg.communities_list.size(); ++i) {
    const auto kk = cfg.communities_list[i];
    SbmSpec sbm = cfg.sbm;
    sbm.community_sizes.assign(kk, cfg.total_nodes / kk);
    auto local = cfg;
    local.profiles.clear();
    auto problem = sbm_problem(sbm, cfg.graph_seed, local);
    const auto d = problem.spec.dimension();
    unsigned n = 0;
    if (!cfg.dimension_orders.empty()) {
      n = cfg.dimension_orders[i];
    } else {
      const auto target = cfg.target_cardinalities.size() == 1 ? cfg.target_cardinalities[0]
                                                               : cfg.target_cardinalities[i];
      n = order_for_cardinality(cfg.family, d, target);
    }
    points.push_back(make_point(std::move(problem), cfg, make_index_set(cfg.family, d, n)));
  }
  return run_points(cfg, points, cfg.m_values);
}

ExperimentResult run_size_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepPoint> points;
  for (auto npc : cfg.nodes_per_community) {
    SbmSpec sbm = cfg.sbm;
    sbm.community_sizes.assign(cfg.k, npc);
    auto problem = sbm_problem(sbm, cfg.graph_seed, cfg);
    const auto d = problem.spec.dimension();
    points.push_back(make_point(std::move(problem), cfg, make_index_set(cfg.family, d, cfg.order)));
  }
  return run_points(cfg, points, cfg.m_values);
}

ExperimentResult run_dataset_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.dataset) throw ConfigError("dataset experiment needs a dataset section");
  const auto& src = *cfg.dataset;
  if (!std::filesystem::exists(src.path)) throw IoError("dataset file '" + src.path + "' not found");
  auto ingest = read_edge_list_file(src.path, src.options);
  const auto n = ingest.graph.n_nodes();
  if (src.expected_nodes && *src.expected_nodes != n)
    throw DomainError("dataset has " + std::to_string(n) + " nodes, expected " + std::to_string(*src.expected_nodes));
  if (src.expected_edges && *src.expected_edges != ingest.records)
    throw DomainError("dataset has " + std::to_string(ingest.records) + " edge records, expected " +
                      std::to_string(*src.expected_edges));

  FluidOptions fluid;
  fluid.max_iter = src.fluid_max_iter;
  auto communities = fluid_communities(ingest.graph, cfg.k, src.community_seed, fluid);
  const auto sizes = communities.partition.sizes();
  const auto d = cfg.k * (cfg.k + 1) / 2;
  if (!cfg.profiles.empty() && cfg.profiles.size() != d)
    throw ConfigError("profiles must list K(K+1)/2 entries");
  DiffusivitySpec spec(std::move(communities.partition), cfg.profiles);
  DiffusionProblem problem{std::move(ingest.graph), std::move(spec), cfg.u0.build(n), cfg.final_time};

  std::vector<SweepPoint> points;
  points.push_back(make_point(std::move(problem), cfg, make_index_set(cfg.family, d, cfg.order)));
  auto result = run_points(cfg, points, cfg.m_values);
  result.community_sizes = sizes;
  result.dataset_nodes = n;
  result.dataset_edges = ingest.records;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.sweep) {
    case SweepKind::SampleCount: return run_m_sweep(cfg);
    case SweepKind::Cardinality: return run_cardinality_sweep(cfg);
    case SweepKind::Dimension: return run_dimension_sweep(cfg);
    case SweepKind::Size: return run_size_sweep(cfg);
    case SweepKind::Dataset: return run_dataset_experiment(cfg);
  }
  throw ConfigError("unknown sweep");
}

const std::vector<std::string> kCsvColumns{
    "experiment_id", "method", "basis",   "index_family", "order",        "cardinality",
    "d",             "n_nodes", "m",      "repeats",      "rmse_geomean", "rmse_geostd",
    "mean_runtime_s", "failures", "status"};

void write_csv_header(std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
}

void write_csv_rows(std::ostream& out, const std::vector<AggregateRow>& rows) {
  auto num = [](double v) {
    if (std::isnan(v)) return std::string();
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    return ss.str();
  };
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << to_string(r.method) << ',' << to_string(r.basis) << ','
        << to_string(r.family) << ',' << r.order << ',' << r.cardinality << ',' << r.d << ',' << r.n_nodes << ','
        << r.m << ',' << r.repeats << ',' << num(r.rmse_geomean) << ',' << num(r.rmse_geostd) << ','
        << num(r.mean_runtime_s) << ',' << r.failures << ',' << r.status << '\n';
  }
}

void append_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (fresh) {
    if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
      std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (fresh) write_csv_header(out);
  write_csv_rows(out, rows);
}

}  // namespace graphdiff
