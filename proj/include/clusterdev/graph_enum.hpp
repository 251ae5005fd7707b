#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace clusterdev {

inline constexpr int kGraphMaxDefault = 7;

// Edge bit k corresponds to the k-th pair (i, j), i < j, in lexicographic order.
struct LabeledGraph {
  int n = 1;
  std::uint32_t edges = 0;
};

inline int pair_count(int n) { return n * (n - 1) / 2; }
int pair_index(int i, int j, int n);
std::pair<int, int> pair_of_index(int k, int n);

// Adjacency rows as vertex bitmasks.
std::vector<std::uint32_t> adjacency(const LabeledGraph& g);

bool is_connected(const LabeledGraph& g);
bool is_biconnected(const LabeledGraph& g);

enum class GraphPredicate { all, connected, biconnected };
std::string to_string(GraphPredicate p);

struct GraphFamily {
  int n = 1;
  GraphPredicate predicate = GraphPredicate::all;
  std::vector<std::uint32_t> masks;  // ascending
  std::size_t size() const { return masks.size(); }
};

GraphFamily enumerate(int n, GraphPredicate predicate, int n_graph_max = kGraphMaxDefault);

// Counting kernels over the full mask range; the OpenMP variant splits the
// range by leading bits and must agree exactly with the serial one.
std::uint64_t count_graphs_serial(int n, GraphPredicate predicate);
std::uint64_t count_graphs_omp(int n, GraphPredicate predicate, int threads = 0);

// (n, predicate) -> count, persisted as "n predicate count" lines.
class GraphCountCache {
 public:
  std::uint64_t get(int n, GraphPredicate predicate);
  bool contains(int n, GraphPredicate predicate) const;
  void load(const std::string& path);
  void save(const std::string& path) const;
  const std::map<std::pair<int, int>, std::uint64_t>& entries() const { return entries_; }

 private:
  std::map<std::pair<int, int>, std::uint64_t> entries_;
};

// W(h) = sum over family members g contained in h of (-1)^{|g|}, for every
// edge mask h. Gives the family sum of products of f when f is -1 on the
// edges of h and 0 elsewhere.
std::vector<double> hard_core_table(const GraphFamily& family);

}  // namespace clusterdev
