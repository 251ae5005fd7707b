#include "clusterdev/graph_enum.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "clusterdev/errors.hpp"
#include "clusterdev/parallel.hpp"

namespace clusterdev {

int pair_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n || i == j) throw ArgumentError("pair_index: invalid pair");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_of_index(int k, int n) {
  for (int i = 0; i < n; ++i) {
    const int row = n - 1 - i;
    if (k < row) return {i, i + 1 + k};
    k -= row;
  }
  throw ArgumentError("pair_of_index: index out of range");
}

std::vector<std::uint32_t> adjacency(const LabeledGraph& g) {
  std::vector<std::uint32_t> adj(g.n, 0);
  int k = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j, ++k)
      if (g.edges >> k & 1u) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
      }
  return adj;
}

namespace {

bool connected_without(const std::vector<std::uint32_t>& adj, int n, std::uint32_t removed) {
  const std::uint32_t all = (n == 32 ? ~0u : (1u << n) - 1u) & ~removed;
  if (all == 0) return true;
  std::uint32_t seen = all & (~all + 1u);
  std::uint32_t frontier = seen;
  while (frontier) {
    const int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const std::uint32_t nb = adj[v] & all & ~seen;
    seen |= nb;
    frontier |= nb;
  }
  return seen == all;
}

bool accept(const LabeledGraph& g, GraphPredicate p) {
  switch (p) {
    case GraphPredicate::all: return true;
    case GraphPredicate::connected: return is_connected(g);
    case GraphPredicate::biconnected: return is_biconnected(g);
  }
  return false;
}

void check_n(int n, int n_graph_max) {
  if (n < 1) throw ArgumentError("graph size must be >= 1");
  if (n > n_graph_max || n > 8)
    throw CapacityError("graph enumeration beyond n_graph_max = " + std::to_string(n_graph_max));
}

}  // namespace

bool is_connected(const LabeledGraph& g) {
  if (g.n <= 1) return true;
  return connected_without(adjacency(g), g.n, 0);
}

bool is_biconnected(const LabeledGraph& g) {
  if (g.n < 2) return false;
  if (g.n == 2) return g.edges & 1u;
  const auto adj = adjacency(g);
  if (!connected_without(adj, g.n, 0)) return false;
  for (int v = 0; v < g.n; ++v)
    if (!connected_without(adj, g.n, 1u << v)) return false;
  return true;
}

std::string to_string(GraphPredicate p) {
  switch (p) {
    case GraphPredicate::all: return "all";
    case GraphPredicate::connected: return "connected";
    case GraphPredicate::biconnected: return "biconnected";
  }
  return "?";
}

GraphFamily enumerate(int n, GraphPredicate predicate, int n_graph_max) {
  check_n(n, n_graph_max);
  GraphFamily fam{n, predicate, {}};
  const std::uint64_t total = 1ull << pair_count(n);
  for (std::uint64_t m = 0; m < total; ++m) {
    LabeledGraph g{n, static_cast<std::uint32_t>(m)};
    // A connected graph needs at least n-1 edges.
    if (predicate != GraphPredicate::all && std::popcount(g.edges) < n - 1) continue;
    if (accept(g, predicate)) fam.masks.push_back(g.edges);
  }
  return fam;
}

std::uint64_t count_graphs_serial(int n, GraphPredicate predicate) {
  check_n(n, 8);
  const std::uint64_t total = 1ull << pair_count(n);
  std::uint64_t c = 0;
  for (std::uint64_t m = 0; m < total; ++m)
    if (accept({n, static_cast<std::uint32_t>(m)}, predicate)) ++c;
  return c;
}

std::uint64_t count_graphs_omp(int n, GraphPredicate predicate, int threads) {
  check_n(n, 8);
  const long long total = 1ll << pair_count(n);
  std::uint64_t c = 0;
#pragma omp parallel for schedule(static) reduction(+ : c) num_threads(resolve_threads(threads))
  for (long long m = 0; m < total; ++m)
    if (accept({n, static_cast<std::uint32_t>(m)}, predicate)) ++c;
  return c;
}

std::uint64_t GraphCountCache::get(int n, GraphPredicate predicate) {
  const auto key = std::make_pair(n, static_cast<int>(predicate));
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  const std::uint64_t c = count_graphs_serial(n, predicate);
  entries_[key] = c;
  return c;
}

bool GraphCountCache::contains(int n, GraphPredicate predicate) const {
  return entries_.count({n, static_cast<int>(predicate)}) > 0;
}

void GraphCountCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int n;
    std::string pred;
    std::uint64_t c;
    if (!(ss >> n >> pred >> c)) continue;
    GraphPredicate p = pred == "connected"     ? GraphPredicate::connected
                       : pred == "biconnected" ? GraphPredicate::biconnected
                                               : GraphPredicate::all;
    entries_[{n, static_cast<int>(p)}] = c;
  }
}

void GraphCountCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write graph count cache " + path);
  out << "# n predicate count\n";
  for (const auto& [k, c] : entries_)
    out << k.first << ' ' << to_string(static_cast<GraphPredicate>(k.second)) << ' ' << c << '\n';
}

std::vector<double> hard_core_table(const GraphFamily& family) {
  const int e = pair_count(family.n);
  if (e > 21) throw CapacityError("hard_core_table: too many edges");
  std::vector<double> w(std::size_t{1} << e, 0.0);
  for (std::uint32_t g : family.masks) w[g] = (std::popcount(g) & 1) ? -1.0 : 1.0;
  // Subset-sum (zeta) transform over the edge lattice.
  for (int b = 0; b < e; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t m = 0; m < w.size(); ++m)
      if (m & bit) w[m] += w[m ^ bit];
  }
  return w;
}

}  // namespace clusterdev
