#include "clusterdev/kernels/graph_quadrature.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>

#include "clusterdev/errors.hpp"
#include "clusterdev/kernels/gauss_legendre.hpp"
#include "clusterdev/parallel.hpp"

namespace clusterdev::kernels {
namespace {

constexpr int kMaxV = 8;
constexpr int kMaxPairs = kMaxV * (kMaxV - 1) / 2;

struct Setup {
  const GraphIntegral* p = nullptr;
  int m = 0;
  int first = 0;
  double lo = 0.0, hi = 0.0;
  bool exact = true;
  bool span = false;
  bool box = false;
  std::vector<std::vector<double>> offsets;  // offsets[q]: sums of <= q signed radii
  int pidx[kMaxV][kMaxV] = {};
  const GaussRule* rules[kMaxV + 1] = {};
};

struct State {
  double x[kMaxV] = {};
  double f[kMaxPairs] = {};
  std::uint32_t hard = 0;
  std::uint32_t nz = 0;
  double boltz[kMaxV + 1] = {};
  std::array<std::vector<double>, kMaxV> cuts;
};

std::vector<double> dedupe(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-12) out.push_back(x);
  return out;
}

int points_at(const Setup& s, int t) {
  if (!s.exact) return std::max(2, s.p->smooth_points);
  const int degree = (s.m - 1 - t) + (s.span ? 1 : 0);
  return degree / 2 + 1;
}

Setup make_setup(const GraphIntegral& p) {
  if (!p.potential) throw ArgumentError("graph integral needs a potential");
  if (p.vertices < 1 || p.vertices > kMaxV) throw CapacityError("graph integral: too many vertices");
  if (p.leaf == Leaf::hard_core_table && !p.table) throw ArgumentError("hard-core leaf needs a table");
  if (p.leaf == Leaf::family_sum && !p.family) throw ArgumentError("family leaf needs a family");
  Setup s;
  s.p = &p;
  s.m = p.vertices;
  s.exact = p.potential->piecewise_constant();
  s.span = p.domain == Domain::pinned_span;
  s.box = p.domain == Domain::box;
  if (p.domain != Domain::pinned && !(p.side > 0.0)) throw ArgumentError("box side must be > 0");
  if (s.box) {
    s.first = 0;
    s.lo = -0.5 * p.side;
    s.hi = 0.5 * p.side;
  } else {
    s.first = 1;
    const double w = (s.m - 1) * p.potential->range;
    s.lo = -w;
    s.hi = w;
  }
  const auto radii = p.potential->breakpoints();
  s.offsets.resize(s.m + 1);
  s.offsets[0] = {0.0};
  for (int q = 1; q <= s.m; ++q) {
    std::vector<double> next = s.offsets[q - 1];
    for (double o : s.offsets[q - 1])
      for (double r : radii) {
        next.push_back(o + r);
        next.push_back(o - r);
      }
    s.offsets[q] = dedupe(std::move(next));
  }
  int k = 0;
  for (int i = 0; i < s.m; ++i)
    for (int j = i + 1; j < s.m; ++j, ++k) s.pidx[i][j] = s.pidx[j][i] = k;
  for (int t = s.first; t < s.m; ++t) s.rules[t] = &gauss_legendre(points_at(s, t));
  return s;
}

// Fills pair data between coordinate t and all earlier ones.
inline void place(const Setup& s, State& st, int t) {
  const GraphIntegral& p = *s.p;
  double prod = t == 0 ? 1.0 : st.boltz[t - 1];
  for (int j = 0; j < t; ++j) {
    const int k = s.pidx[j][t];
    const double f = mayer_f_radial(*p.potential, p.beta, st.x[t] - st.x[j]);
    st.f[k] = f;
    const std::uint32_t bit = 1u << k;
    st.hard = f == -1.0 ? (st.hard | bit) : (st.hard & ~bit);
    st.nz = f != 0.0 ? (st.nz | bit) : (st.nz & ~bit);
    prod *= 1.0 + f;
  }
  st.boltz[t] = prod;
}

double connected_sum(const Setup& s, const State& st) {
  const int m = s.m;
  const std::uint32_t full = (1u << m) - 1u;
  std::array<double, 1u << kMaxV> e{}, c{};
  e[0] = 1.0;
  for (std::uint32_t set = 1; set <= full; ++set) {
    const int v = 31 - std::countl_zero(set);
    const std::uint32_t rest = set & ~(1u << v);
    double prod = e[rest];
    for (std::uint32_t r = rest; r; r &= r - 1) prod *= 1.0 + st.f[s.pidx[std::countr_zero(r)][v]];
    e[set] = prod;
  }
  for (std::uint32_t set = 1; set <= full; ++set) {
    const std::uint32_t low = set & (~set + 1u);
    double v = e[set];
    const std::uint32_t others = set & ~low;
    // proper subsets U of set containing the lowest vertex
    for (std::uint32_t sub = (others - 1) & others;; sub = (sub - 1) & others) {
      const std::uint32_t u = sub | low;
      v -= c[u] * e[set & ~u];
      if (sub == 0) break;
    }
    if (others == 0) v = e[set];
    c[set] = v;
  }
  return c[full];
}

inline double leaf(const Setup& s, const State& st) {
  const GraphIntegral& p = *s.p;
  double v = 0.0;
  switch (p.leaf) {
    case Leaf::hard_core_table: v = (*p.table)[st.hard]; break;
    case Leaf::family_sum:
      for (std::uint32_t g : *p.family) {
        if (g & ~st.nz) continue;
        double prod = 1.0;
        for (std::uint32_t r = g; r; r &= r - 1) prod *= st.f[std::countr_zero(r)];
        v += prod;
      }
      break;
    case Leaf::connected_sum: v = connected_sum(s, st); break;
    case Leaf::boltzmann: v = st.boltz[s.m - 1]; break;
  }
  if (s.span && v != 0.0) {
    double lo = st.x[0], hi = st.x[0];
    for (int i = 1; i < s.m; ++i) {
      lo = std::min(lo, st.x[i]);
      hi = std::max(hi, st.x[i]);
    }
    v *= std::max(0.0, p.side - (hi - lo)) / p.side;
  }
  return v;
}

void make_cuts(const Setup& s, const State& st, int t, std::vector<double>& cuts) {
  const int q = s.m - t;
  const auto& off = s.offsets[q];
  cuts.clear();
  cuts.push_back(s.lo);
  cuts.push_back(s.hi);
  for (int j = 0; j < t; ++j)
    for (double o : off) cuts.push_back(st.x[j] + o);
  if (s.box)
    for (double o : off) {
      cuts.push_back(s.lo + o);
      cuts.push_back(s.hi + o);
    }
  std::sort(cuts.begin(), cuts.end());
  std::size_t w = 0;
  for (double c : cuts) {
    if (c < s.lo || c > s.hi) continue;
    if (w > 0 && c - cuts[w - 1] <= 1e-13 * (1.0 + std::abs(c))) continue;
    cuts[w++] = c;
  }
  cuts.resize(w);
}

double level(const Setup& s, State& st, int t) {
  if (t == s.m) return leaf(s, st);
  auto& cuts = st.cuts[t];
  make_cuts(s, st, t, cuts);
  const GaussRule& rule = *s.rules[t];
  const std::size_t ncut = cuts.size();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ncut; ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double part = 0.0;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      st.x[t] = c + h * rule.x[k];
      place(s, st, t);
      if (s.p->leaf == Leaf::boltzmann && st.boltz[t] == 0.0) continue;
      part += rule.w[k] * level(s, st, t + 1);
    }
    acc += h * part;
  }
  return acc;
}

struct Node {
  double x, w;
};

std::vector<Node> outer_nodes(const Setup& s, State& st) {
  std::vector<double> cuts;
  make_cuts(s, st, s.first, cuts);
  const GaussRule& rule = *s.rules[s.first];
  std::vector<Node> nodes;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double h = 0.5 * (cuts[i + 1] - cuts[i]), c = 0.5 * (cuts[i] + cuts[i + 1]);
    for (std::size_t k = 0; k < rule.x.size(); ++k) nodes.push_back({c + h * rule.x[k], h * rule.w[k]});
  }
  return nodes;
}

double node_value(const Setup& s, const State& proto, const Node& nd) {
  State st = proto;
  st.x[s.first] = nd.x;
  place(s, st, s.first);
  if (s.p->leaf == Leaf::boltzmann && st.boltz[s.first] == 0.0) return 0.0;
  return nd.w * level(s, st, s.first + 1);
}

State initial_state(const Setup& s) {
  State st;
  if (!s.box) {
    st.x[0] = 0.0;
    st.boltz[0] = 1.0;
  }
  (void)s;
  return st;
}

bool trivially_zero(const GraphIntegral& p) {
  return p.leaf != Leaf::boltzmann && p.potential->is_zero();
}

double single_vertex(const GraphIntegral& p) {
  // m = 1: only the box measure (or the pinned point) remains.
  if (p.leaf == Leaf::boltzmann || p.leaf == Leaf::connected_sum) return p.domain == Domain::box ? p.side : 1.0;
  return 0.0;
}

}  // namespace

double integrate_graph_serial(const GraphIntegral& problem) {
  if (trivially_zero(problem)) return 0.0;
  if (problem.vertices == 1) return single_vertex(problem);
  const Setup s = make_setup(problem);
  State proto = initial_state(s);
  const auto nodes = outer_nodes(s, proto);
  double sum = 0.0;
  for (const Node& nd : nodes) sum += node_value(s, proto, nd);
  return sum;
}

double integrate_graph_omp(const GraphIntegral& problem, int threads) {
  if (trivially_zero(problem)) return 0.0;
  if (problem.vertices == 1) return single_vertex(problem);
  const Setup s = make_setup(problem);
  State proto = initial_state(s);
  const auto nodes = outer_nodes(s, proto);
  std::vector<double> part(nodes.size(), 0.0);
  const long long n = static_cast<long long>(nodes.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (long long i = 0; i < n; ++i) part[i] = node_value(s, proto, nodes[i]);
  double sum = 0.0;
  for (double v : part) sum += v;
  return sum;
}

namespace {
std::uint64_t count_level(const Setup& s, State& st, int t) {
  if (t == s.m) return 1;
  auto& cuts = st.cuts[t];
  make_cuts(s, st, t, cuts);
  const GaussRule& rule = *s.rules[t];
  std::uint64_t n = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      st.x[t] = 0.5 * (cuts[i] + cuts[i + 1]) + 0.5 * (cuts[i + 1] - cuts[i]) * rule.x[k];
      place(s, st, t);
      if (s.p->leaf == Leaf::boltzmann && st.boltz[t] == 0.0) continue;
      n += count_level(s, st, t + 1);
    }
  return n;
}
}  // namespace

std::uint64_t count_graph_leaves(const GraphIntegral& problem) {
  if (trivially_zero(problem) || problem.vertices == 1) return 0;
  const Setup s = make_setup(problem);
  State st = initial_state(s);
  return count_level(s, st, s.first);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {

struct McSetup {
  Setup s;
  int dim;
  double lo, hi, volume;
};

McSetup make_mc(const McIntegral& p) {
  if (p.base.domain == Domain::pinned_span)
    throw ArgumentError("Monte Carlo supports pinned and box domains only");
  if (p.dim < 1) throw ArgumentError("dimension must be >= 1");
  McSetup m{make_setup(p.base), p.dim, 0, 0, 1};
  m.lo = m.s.lo;
  m.hi = m.s.hi;
  const int free_coords = (m.s.m - m.s.first) * p.dim;
  m.volume = std::pow(m.hi - m.lo, free_coords);
  return m;
}

struct ChunkSum {
  double s = 0.0, s2 = 0.0;
};

ChunkSum run_chunk(const McSetup& m, const McIntegral& p, std::uint64_t chunk, std::uint64_t count) {
  std::mt19937_64 rng(splitmix64(p.seed ^ splitmix64(chunk + 1)));
  std::uniform_real_distribution<double> u(m.lo, m.hi);
  std::array<double, kMaxV * 3> q{};
  const int d = m.dim;
  if (d > 3) throw CapacityError("Monte Carlo graph integrals support d <= 3");
  State st;
  ChunkSum cs;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (int v = m.s.first; v < m.s.m; ++v)
      for (int k = 0; k < d; ++k) q[v * d + k] = u(rng);
    double prod = 1.0;
    st.hard = st.nz = 0;
    for (int a = 0; a < m.s.m; ++a)
      for (int b = a + 1; b < m.s.m; ++b) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double dd = q[a * d + k] - q[b * d + k];
          r2 += dd * dd;
        }
        const int idx = m.s.pidx[a][b];
        const double f = mayer_f_radial(*p.base.potential, p.base.beta, std::sqrt(r2));
        st.f[idx] = f;
        if (f == -1.0) st.hard |= 1u << idx;
        if (f != 0.0) st.nz |= 1u << idx;
        prod *= 1.0 + f;
      }
    st.boltz[m.s.m - 1] = prod;
    const double v = leaf(m.s, st);
    cs.s += v;
    cs.s2 += v * v;
  }
  return cs;
}

McResult finish(const McSetup& m, const std::vector<ChunkSum>& parts, std::uint64_t n) {
  double s = 0.0, s2 = 0.0;
  for (const auto& c : parts) {
    s += c.s;
    s2 += c.s2;
  }
  const double mean = s / static_cast<double>(n);
  const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
  return {m.volume * mean, m.volume * std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

McResult integrate_graph_mc_serial(const McIntegral& problem) {
  if (trivially_zero(problem.base)) return {};
  const McSetup m = make_mc(problem);
  const std::uint64_t n = problem.samples, chunks = (n + kMcChunk - 1) / kMcChunk;
  std::vector<ChunkSum> parts(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c)
    parts[c] = run_chunk(m, problem, c, std::min(kMcChunk, n - c * kMcChunk));
  return finish(m, parts, n);
}

McResult integrate_graph_mc_omp(const McIntegral& problem, int threads) {
  if (trivially_zero(problem.base)) return {};
  const McSetup m = make_mc(problem);
  const std::uint64_t n = problem.samples, chunks = (n + kMcChunk - 1) / kMcChunk;
  std::vector<ChunkSum> parts(chunks);
  const long long nc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (long long c = 0; c < nc; ++c)
    parts[c] = run_chunk(m, problem, static_cast<std::uint64_t>(c),
                         std::min<std::uint64_t>(kMcChunk, n - static_cast<std::uint64_t>(c) * kMcChunk));
  return finish(m, parts, n);
}

}  // namespace clusterdev::kernels
