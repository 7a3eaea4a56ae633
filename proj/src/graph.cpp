#include "graphdiff/graph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "graphdiff/errors.hpp"
#include "graphdiff/random.hpp"

namespace graphdiff {

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  const auto n = weights_.rows();
  if (n < 1 || weights_.cols() != n)
    throw DomainError("weight matrix must be square with at least one node");
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(n))
    throw DomainError("label count does not match node count");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw DomainError("weight matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = weights_(i, j);
      if (w != weights_(j, i)) throw DomainError("weight matrix must be symmetric");
      if (!std::isfinite(w) || w < 0.0)
        throw DomainError("edge weights must be finite and nonnegative");
    }
  }
}

WeightedGraph WeightedGraph::from_edges(std::size_t n_nodes, const std::vector<Edge>& edges,
                                        std::vector<std::string> labels) {
  if (n_nodes < 1) throw DomainError("graph needs at least one node");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (const auto& e : edges) {
    if (e.u >= n_nodes || e.v >= n_nodes) throw DomainError("edge endpoint out of range");
    if (e.u == e.v) continue;
    w(e.u, e.v) = e.weight;
    w(e.v, e.u) = e.weight;
  }
  return WeightedGraph(std::move(w), std::move(labels));
}

Eigen::MatrixXd WeightedGraph::adjacency() const {
  return (weights_.array() != 0.0).cast<double>().matrix();
}

Eigen::VectorXd WeightedGraph::degrees(bool weighted) const {
  return weighted ? Eigen::VectorXd(weights_.rowwise().sum())
                  : Eigen::VectorXd(adjacency().rowwise().sum());
}

std::size_t WeightedGraph::edge_count() const {
  std::size_t count = 0;
  const auto n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (weights_(i, j) != 0.0) ++count;
  return count;
}

std::vector<WeightedGraph::Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  const auto n = n_nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (weights_(i, j) != 0.0) out.push_back({i, j, weights_(i, j)});
  return out;
}

std::vector<std::vector<std::size_t>> WeightedGraph::neighbors() const {
  const auto n = n_nodes();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (weights_(i, j) != 0.0) adj[i].push_back(j);
  return adj;
}

bool WeightedGraph::is_connected() const {
  const auto adj = neighbors();
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == adj.size();
}

void SbmSpec::validate() const {
  if (community_sizes.empty()) throw InvalidSpecError("SBM needs at least one community");
  for (auto s : community_sizes)
    if (s == 0) throw InvalidSpecError("SBM community sizes must be positive");
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(p_intra) || !in_unit(p_inter))
    throw InvalidSpecError("SBM probabilities must lie in [0,1]");
  if (!(edge_weight > 0.0) || !std::isfinite(edge_weight))
    throw InvalidSpecError("SBM edge weight must be positive");
}

std::vector<std::size_t> sbm_assignment(const SbmSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < spec.community_sizes.size(); ++k)
    out.insert(out.end(), spec.community_sizes[k], k);
  return out;
}

WeightedGraph generate_sbm(const SbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto block = sbm_assignment(spec);
  const auto n = block.size();
  Rng rng(seed);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? spec.p_intra : spec.p_inter;
      if (uniform01(rng) < p) {
        w(i, j) = spec.edge_weight;
        w(j, i) = spec.edge_weight;
      }
    }
  }
  return WeightedGraph(std::move(w));
}

Eigen::MatrixXd laplacian(const WeightedGraph& g, bool weighted) {
  const auto n = g.n_nodes();
  Eigen::MatrixXd l = weighted ? Eigen::MatrixXd(-g.weights()) : Eigen::MatrixXd(-g.adjacency());
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) diag -= l(i, j);
    l(i, i) = diag;
  }
  return l;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    if (s[i] == '{') {  // networkx attribute dict runs to end of line
      out.push_back(s.substr(i));
      break;
    }
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_int(std::string_view s, long long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars for doubles is missing on older libstdc++; strtod on a copy.
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return !buf.empty() && end == buf.c_str() + buf.size();
}

bool parse_weight_token(std::string_view tok, double& out) {
  if (tok.empty() || tok.front() != '{') return parse_double(tok, out);
  const auto key = tok.find("weight");
  if (key == std::string_view::npos) return false;
  const auto colon = tok.find(':', key);
  if (colon == std::string_view::npos) return false;
  auto rest = tok.substr(colon + 1);
  const auto stop = rest.find_first_of(",}");
  return parse_double(trim(rest.substr(0, stop)), out);
}

struct PairStats {
  double sum = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

}  // namespace

Symmetrize parse_symmetrize(std::string_view name) {
  if (name == "max") return Symmetrize::Max;
  if (name == "mean") return Symmetrize::Mean;
  if (name == "sum") return Symmetrize::Sum;
  throw InvalidSpecError("unknown symmetrize rule '" + std::string(name) + "'");
}

EdgeListResult read_edge_list(std::string_view text, const EdgeListOptions& options) {
  std::unordered_map<long long, std::size_t> index;
  std::vector<std::string> labels;
  std::map<std::pair<std::size_t, std::size_t>, PairStats> pairs;
  std::size_t records = 0;
  std::size_t self_loops = 0;

  auto node_of = [&](long long id) {
    auto [it, inserted] = index.try_emplace(id, labels.size());
    if (inserted) labels.push_back(std::to_string(id));
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (!options.comment_prefix.empty() && line.starts_with(options.comment_prefix)) continue;

    const auto tokens = split_ws(line);
    if (tokens.size() < 2 || tokens.size() > 3)
      throw ParseError(line_no, "expected 'u v' or 'u v w'");
    long long a = 0, b = 0;
    if (!parse_int(tokens[0], a) || !parse_int(tokens[1], b))
      throw ParseError(line_no, "node ids must be integers");
    if (a < 0 || b < 0) throw ParseError(line_no, "node ids must be nonnegative");
    if (options.one_indexed && (a == 0 || b == 0))
      throw ParseError(line_no, "node id 0 in a one-indexed file");
    double w = 1.0;
    if (tokens.size() == 3) {
      double parsed = 0.0;
      if (!parse_weight_token(tokens[2], parsed) || !std::isfinite(parsed))
        throw ParseError(line_no, "malformed edge weight");
      if (parsed < 0.0)
        throw DomainError("line " + std::to_string(line_no) + ": negative edge weight");
      if (options.weighted) w = parsed;
    }
    const auto u = node_of(a);
    const auto v = node_of(b);
    if (u == v) {
      ++self_loops;
      continue;
    }
    ++records;
    auto& st = pairs[{std::min(u, v), std::max(u, v)}];
    st.sum += w;
    st.max = st.count == 0 ? w : std::max(st.max, w);
    ++st.count;
  }
  if (labels.empty()) throw ParseError(line_no, "edge list contains no edges");

  std::vector<WeightedGraph::Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [key, st] : pairs) {
    double w = 0.0;
    switch (options.symmetrize) {
      case Symmetrize::Max: w = st.max; break;
      case Symmetrize::Mean: w = st.sum / static_cast<double>(st.count); break;
      case Symmetrize::Sum: w = st.sum; break;
    }
    edges.push_back({key.first, key.second, w});
  }
  const auto n = labels.size();
  return {WeightedGraph::from_edges(n, edges, std::move(labels)), records, self_loops};
}

WeightedGraph parse_edge_list(std::string_view text, const EdgeListOptions& options) {
  return read_edge_list(text, options).graph;
}

EdgeListResult read_edge_list_file(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open edge list '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_edge_list(ss.str(), options);
}

nlohmann::json graph_to_json(const WeightedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.weight});
  nlohmann::json j{{"n_nodes", g.n_nodes()}, {"edges", std::move(edges)}};
  if (!g.labels().empty()) j["labels"] = g.labels();
  return j;
}

WeightedGraph graph_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n_nodes").get<std::size_t>();
    std::vector<WeightedGraph::Edge> edges;
    for (const auto& e : j.at("edges")) {
      const double w = e.size() > 2 ? e[2].get<double>() : 1.0;
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), w});
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    return WeightedGraph::from_edges(n, edges, std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("graph JSON: ") + e.what());
  }
}

}  // namespace graphdiff
