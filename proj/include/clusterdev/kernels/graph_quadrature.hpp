#pragma once

#include <cstdint>
#include <vector>

#include "clusterdev/potentials.hpp"

namespace clusterdev::kernels {

// pinned:      x_1 = 0, others on [-(m-1)R, (m-1)R]; plain integral.
// pinned_span: as pinned, weighted by (l - span(x))/l. Equals
//              (1/|Lambda|) * integral over the box (-l/2, l/2]^m for
//              translation-invariant integrands whose support has span < l.
// box:         every coordinate on (-l/2, l/2].
enum class Domain { pinned, pinned_span, box };

// hard_core_table: value = table[mask of pairs with f = -1]
// family_sum:      sum over listed graphs of the product of f on their edges
// connected_sum:   sum over all connected graphs (Ursell recursion)
// boltzmann:       product over all pairs of (1 + f)
enum class Leaf { hard_core_table, family_sum, connected_sum, boltzmann };

struct GraphIntegral {
  const PairPotential* potential = nullptr;
  double beta = 1.0;
  int vertices = 2;
  Domain domain = Domain::pinned;
  double side = 0.0;
  Leaf leaf = Leaf::family_sum;
  const std::vector<double>* table = nullptr;
  const std::vector<std::uint32_t>* family = nullptr;
  int smooth_points = 16;
};

// Tensor Gauss-Legendre over 1D coordinates. Each coordinate range is split
// at x_j + (sums of up to q breakpoint radii) and at the box edges shifted
// by the same sums, so piecewise-constant potentials are integrated exactly.
double integrate_graph_serial(const GraphIntegral& problem);
double integrate_graph_omp(const GraphIntegral& problem, int threads = 0);

// Number of leaf evaluations the tensor rule performs (for benchmarks).
std::uint64_t count_graph_leaves(const GraphIntegral& problem);

// Monte Carlo in any dimension: pinned samples x_2..x_m in the cube
// [-(m-1)R, (m-1)R]^d, box samples all coordinates in (-l/2, l/2]^d.
// Chunks of kMcChunk samples use independent seeded streams and are reduced
// in chunk order, so serial and parallel results are bit-identical.
inline constexpr std::uint64_t kMcChunk = 4096;

struct McIntegral {
  GraphIntegral base;
  int dim = 2;
  std::uint64_t samples = 1u << 20;
  std::uint64_t seed = 1;
};

struct McResult {
  double value = 0.0;
  double std_error = 0.0;
};

McResult integrate_graph_mc_serial(const McIntegral& problem);
McResult integrate_graph_mc_omp(const McIntegral& problem, int threads = 0);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace clusterdev::kernels
