#include "graphdiff/community.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "graphdiff/errors.hpp"
#include "graphdiff/random.hpp"

namespace graphdiff {

CommunityPartition::CommunityPartition(std::vector<std::size_t> assignment, std::size_t k)
    : assignment_(std::move(assignment)), k_(k) {
  if (k_ < 1) throw DomainError("partition needs K >= 1");
  if (assignment_.empty()) throw DomainError("partition must cover at least one node");
  std::vector<char> seen(k_, 0);
  for (auto c : assignment_) {
    if (c >= k_) throw DomainError("community id out of range");
    seen[c] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw DomainError("every community must be non-empty");
}

CommunityPartition CommunityPartition::from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> a;
  for (std::size_t k = 0; k < sizes.size(); ++k) a.insert(a.end(), sizes[k], k);
  return CommunityPartition(std::move(a), sizes.size());
}

std::vector<std::size_t> CommunityPartition::sizes() const {
  std::vector<std::size_t> s(k_, 0);
  for (auto c : assignment_) ++s[c];
  return s;
}

BlockIndexMap::BlockIndexMap(std::size_t k) : k_(k) {
  if (k_ < 1) throw DomainError("block index map needs K >= 1");
}

std::size_t BlockIndexMap::operator()(std::size_t i, std::size_t j) const {
  if (i >= k_ || j >= k_) throw DomainError("community index out of range");
  if (i > j) std::swap(i, j);
  // Pairs (0,0..K-1) come first, then (1,1..K-1), ...
  return i * k_ - i * (i - 1) / 2 + (j - i);
}

FluidResult fluid_communities(const WeightedGraph& g, std::size_t k, std::uint64_t seed,
                              const FluidOptions& options) {
  const auto n = g.n_nodes();
  if (k < 1 || k > n) throw DomainError("fluid communities needs 1 <= K <= n_nodes");
  if (!g.is_connected()) throw DomainError("fluid communities requires a connected graph");

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  const auto adj = g.neighbors();
  Rng rng(seed);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<std::size_t> community(n, kNone);
  std::vector<std::size_t> count(k, 0);
  std::vector<double> density(k, 1.0);
  {
    auto seeds = order;
    shuffle(std::span(seeds), rng);
    for (std::size_t c = 0; c < k; ++c) {
      community[seeds[c]] = c;
      count[c] = 1;
    }
  }

  std::vector<double> score(k, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> best;
  std::size_t sweeps = 0;
  bool converged = false;
  while (sweeps < options.max_iter) {
    ++sweeps;
    bool changed = false;
    shuffle(std::span(order), rng);
    for (auto v : order) {
      touched.clear();
      auto add = [&](std::size_t node) {
        const auto c = community[node];
        if (c == kNone) return;
        if (score[c] == 0.0) touched.push_back(c);
        score[c] += density[c];
      };
      add(v);
      for (auto u : adj[v]) add(u);
      if (touched.empty()) continue;

      double top = 0.0;
      for (auto c : touched) top = std::max(top, score[c]);
      best.clear();
      for (auto c : touched)
        if (top - score[c] <= 1e-12 * top) best.push_back(c);
      for (auto c : touched) score[c] = 0.0;

      // Staying put on a tie keeps every community non-empty: a singleton
      // node scores 1 for its own community and at most 1 for any other.
      const auto current = community[v];
      if (std::find(best.begin(), best.end(), current) != best.end()) continue;
      std::sort(best.begin(), best.end());
      const auto next = best[uniform_below(rng, best.size())];
      if (current != kNone) {
        --count[current];
        density[current] = count[current] ? 1.0 / static_cast<double>(count[current]) : 1.0;
      }
      community[v] = next;
      ++count[next];
      density[next] = 1.0 / static_cast<double>(count[next]);
      changed = true;
    }
    if (!changed) {
      converged = true;
      break;
    }
  }

  // Only reachable with a tiny sweep budget: attach leftovers breadth-first.
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (community[v] != kNone) queue.push_back(v);
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : adj[v]) {
      if (community[u] == kNone) {
        community[u] = community[v];
        queue.push_back(u);
      }
    }
  }

  return {CommunityPartition(std::move(community), k), sweeps, converged};
}

nlohmann::json partition_to_json(const CommunityPartition& p) {
  std::vector<std::size_t> one_based(p.assignment());
  for (auto& c : one_based) ++c;
  return {{"K", p.k()}, {"assignment", one_based}, {"sizes", p.sizes()}};
}

CommunityPartition partition_from_json(const nlohmann::json& j) {
  try {
    auto a = j.at("assignment").get<std::vector<std::size_t>>();
    for (auto& c : a) {
      if (c == 0) throw DomainError("community ids in JSON are 1-based");
      --c;
    }
    return CommunityPartition(std::move(a), j.at("K").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("partition JSON: ") + e.what());
  }
}

}  // namespace graphdiff
