// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include "clusterdev/cluster_coeffs.hpp"

#include <bit>
#include <cmath>
#include <functional>

#include "clusterdev/errors.hpp"
#include "clusterdev/graph_enum.hpp"
#include "clusterdev/kernels/graph_quadrature.hpp"

namespace clusterdev {

std::string to_string(TableMode m) {
  switch (m) {
    case TableMode::polymer_exact: return "polymer-exact";
    case TableMode::two_connected: return "two-connected-integral";
    case TableMode::infinite_volume: return "infinite-volume";
    case TableMode::oracle_fitted: return "oracle-fitted";
  }
  return "?";
}

TableMode table_mode_from_string(const std::string& s) {
  if (s == "polymer-exact" || s == "polymer") return TableMode::polymer_exact;
  if (s == "two-connected-integral" || s == "two-connected") return TableMode::two_connected;
  if (s == "infinite-volume" || s == "infinite") return TableMode::infinite_volume;
  if (s == "oracle-fitted" || s == "oracle-fit") return TableMode::oracle_fitted;
  throw ArgumentError("unknown table mode '" + s + "'");
}

double ClusterTable::value(int n) const {
  if (n < 1 || n > n_max) throw RangeError("cluster table has no row n = " + std::to_string(n));
  return values[n - 1];
}

bool ClusterTable::all_zero() const {
  for (double v : values)
    if (v != 0.0) return false;
  return true;
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

struct FamilyData {
  GraphFamily family;
  std::vector<double> table;
};

FamilyData family_for(const PairPotential& pot, int m, GraphPredicate pred) {
  FamilyData d{enumerate(m, pred), {}};
  if (pot.pure_hard_core()) d.table = hard_core_table(d.family);
  return d;
}

kernels::GraphIntegral problem_for(const PairPotential& pot, double beta, int m, const FamilyData& fd,
                                   bool connected_leaf, const IntegrationConfig& cfg) {
  kernels::GraphIntegral p;
  p.potential = &pot;
  p.beta = beta;
  p.vertices = m;
  p.smooth_points = cfg.points > 0 ? cfg.points : 16;
  if (!fd.table.empty()) {
    p.leaf = kernels::Leaf::hard_core_table;
    p.table = &fd.table;
  } else if (connected_leaf) {
    p.leaf = kernels::Leaf::connected_sum;
  } else {
    p.leaf = kernels::Leaf::family_sum;
    p.family = &fd.family.masks;
  }
  return p;
}

// Tensor rule, with a second pass at higher order for smooth potentials.
QuadratureValue run_tensor(kernels::GraphIntegral p, const PairPotential& pot, const IntegrationConfig& cfg) {
  auto once = [&](const kernels::GraphIntegral& q) {
    return cfg.parallel ? kernels::integrate_graph_omp(q, cfg.threads) : kernels::integrate_graph_serial(q);
  };
  const double v = once(p);
  if (pot.piecewise_constant()) return {v, 0.0};
  p.smooth_points += 8;
  const double v2 = once(p);
  QuadratureValue out{v2, std::abs(v2 - v)};
  if (out.error > std::max(cfg.rel_tol * std::abs(out.value), 1e-13))
    throw IntegrationError("graph quadrature error above tolerance");
  return out;
}

QuadratureValue run_mc(const kernels::GraphIntegral& p, int dim, const IntegrationConfig& cfg, std::uint64_t tag) {
  kernels::McIntegral mc{p, dim, cfg.samples, kernels::splitmix64(cfg.seed ^ kernels::splitmix64(tag))};
  const auto r = cfg.parallel ? kernels::integrate_graph_mc_omp(mc, cfg.threads)
                              : kernels::integrate_graph_mc_serial(mc);
  return {r.value, r.std_error};
}

bool use_tensor(int dim, const IntegrationConfig& cfg) {
  return dim == 1 && cfg.scheme == Scheme::tensor_quadrature;
}

void check_graph_n(int n) {
  if (n < 1) throw ArgumentError("coefficient order must be >= 1");
  if (n + 1 > kGraphMaxDefault)
    throw CapacityError("coefficient order n = " + std::to_string(n) + " exceeds n_graph_max - 1");
}

// Box-integral over Lambda^m of a connected-support integrand divided by |Lambda|.
QuadratureValue per_volume_box_integral(const PairPotential& pot, double beta, const SimulationRegion& region,
                                        int m, GraphPredicate pred, const IntegrationConfig& cfg,
                                        std::uint64_t tag) {
  const FamilyData fd = family_for(pot, m, pred);
  auto p = problem_for(pot, beta, m, fd, pred == GraphPredicate::connected, cfg);
  p.side = region.side;
  if (use_tensor(region.dim, cfg)) {
    if (region.side > (m - 1) * pot.range * (1.0 + 1e-12)) {
      p.domain = kernels::Domain::pinned_span;
      return run_tensor(p, pot, cfg);
    }
    p.domain = kernels::Domain::box;
    auto r = run_tensor(p, pot, cfg);
    return {r.value / region.side, r.error / region.side};
  }
  p.domain = kernels::Domain::box;
  auto r = run_mc(p, region.dim, cfg, tag);
  const double vol = region.volume();
  return {r.value / vol, r.error / vol};
}

}  // namespace

QuadratureValue beta_n_infinite(const PairPotential& pot, double beta, int n, int dim, const IntegrationConfig& cfg) {
  check_graph_n(n);
  if (!(beta > 0.0)) throw ArgumentError("beta must be > 0");
  if (pot.is_zero()) return {0.0, 0.0};
  const FamilyData fd = family_for(pot, n + 1, GraphPredicate::biconnected);
  auto p = problem_for(pot, beta, n + 1, fd, false, cfg);
  p.domain = kernels::Domain::pinned;
  QuadratureValue r = use_tensor(dim, cfg) ? run_tensor(p, pot, cfg) : run_mc(p, dim, cfg, 1000 + n);
  const double nf = factorial(n);
  return {r.value / nf, r.error / nf};
}

QuadratureValue b_lambda_2connected(const PairPotential& pot, double beta, const SimulationRegion& region, int n,
                                    const IntegrationConfig& cfg) {
  if (region.infinite) return beta_n_infinite(pot, beta, n, region.dim, cfg);
  check_graph_n(n);
  if (!(beta > 0.0)) throw ArgumentError("beta must be > 0");
  if (pot.is_zero()) return {0.0, 0.0};
  auto r = per_volume_box_integral(pot, beta, region, n + 1, GraphPredicate::biconnected, cfg, 2000 + n);
  const double nf = factorial(n);
  return {r.value / nf, r.error / nf};
}

QuadratureValue polymer_weight(const PairPotential& pot, double beta, const SimulationRegion& region, int k,
                               const IntegrationConfig& cfg) {
  if (region.infinite) throw ArgumentError("polymer weights need a finite region");
  if (k < 2) throw ArgumentError("polymers have at least two vertices");
  if (k > kGraphMaxDefault) throw CapacityError("polymer size beyond n_graph_max");
  if (pot.is_zero()) return {0.0, 0.0};
  return per_volume_box_integral(pot, beta, region, k, GraphPredicate::connected, cfg, 3000 + k);
}

double polymer_coefficient(const std::vector<std::uint32_t>& supports, const std::vector<int>& counts) {
  std::vector<std::uint32_t> copies;
  double ifact = 1.0;
  for (std::size_t i = 0; i < supports.size(); ++i) {
    for (int c = 0; c < counts[i]; ++c) copies.push_back(supports[i]);
    ifact *= std::tgamma(counts[i] + 1.0);
  }
  const int m = static_cast<int>(copies.size());
  if (m == 0) return 0.0;
  if (m > 12) throw CapacityError("polymer multi-index too large");
  std::vector<std::uint32_t> adj(m, 0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (copies[i] & copies[j]) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
      }
  const std::uint32_t full = (1u << m) - 1u;
  // t(S): signed count of all spanning subgraphs of the induced graph,
  // which is 1 when S is independent and 0 otherwise.
  auto independent = [&](std::uint32_t s) {
    for (std::uint32_t r = s; r; r &= r - 1)
      if (adj[std::countr_zero(r)] & s) return false;
    return true;
  };
  std::vector<double> conn(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t low = s & (~s + 1u), others = s & ~low;
    double v = independent(s) ? 1.0 : 0.0;
    if (others) {
      for (std::uint32_t sub = (others - 1) & others;; sub = (sub - 1) & others) {
        const std::uint32_t u = sub | low;
        if (conn[u] != 0.0 && independent(s & ~u)) v -= conn[u];
        if (sub == 0) break;
      }
    }
    conn[s] = v;
  }
  return conn[full] / ifact;
}

QuadratureValue polymer_sum(int n, const std::vector<double>& w, double volume, int excess_order) {
  if (n < 1) throw ArgumentError("polymer_sum: n must be >= 1");
  if (excess_order < 0) throw ArgumentError("polymer_sum: excess order must be >= 0");
  const int nv = n + 1;
  if (static_cast<int>(w.size()) < nv + 1) throw ArgumentError("polymer_sum: missing weights");
  const std::uint32_t full = (1u << nv) - 1u;
  std::vector<std::uint32_t> polys;
  for (std::uint32_t s = 1; s <= full; ++s)
    if (std::popcount(s) >= 2) polys.push_back(s);
  const int P = static_cast<int>(polys.size());
  const int budget = n + excess_order;
  std::vector<double> by_order(excess_order + 1, 0.0);
  std::vector<int> counts(P, 0);
  std::vector<std::uint32_t> sup;
  std::vector<int> cnt;

  auto supports_connected = [&]() {
    std::uint32_t seen = 1u, frontier = 1u;
    const int k = static_cast<int>(sup.size());
    while (frontier) {
      const int i = std::countr_zero(frontier);
      frontier &= frontier - 1;
      for (int j = 0; j < k; ++j)
        if (!(seen >> j & 1u) && (sup[i] & sup[j])) {
          seen |= 1u << j;
          frontier |= 1u << j;
        }
    }
    return seen == (1u << k) - 1u;
  };

  std::function<void(int, int, std::uint32_t)> rec = [&](int idx, int used, std::uint32_t uni) {
    if (idx == P) {
      if (uni != full || used < n) return;
      sup.clear();
      cnt.clear();
      double weight = 1.0;
      for (int i = 0; i < P; ++i)
        if (counts[i] > 0) {
          sup.push_back(polys[i]);
          cnt.push_back(counts[i]);
          weight *= std::pow(w[std::popcount(polys[i])], counts[i]);
        }
      if (weight == 0.0 || !supports_connected()) return;
      const int ex = used - n;
      by_order[ex] += polymer_coefficient(sup, cnt) * weight * std::pow(volume, -ex);
      return;
    }
    const int cost = std::popcount(polys[idx]) - 1;
    for (int c = 0; used + c * cost <= budget; ++c) {
      counts[idx] = c;
      rec(idx + 1, used + c * cost, c > 0 ? (uni | polys[idx]) : uni);
    }
    counts[idx] = 0;
  };
  rec(0, 0, 0u);

  double total = 0.0;
  for (double v : by_order) total += v;
  const double nf = factorial(n);
  return {total / nf, std::abs(by_order.back()) / nf};
}

QuadratureValue b_lambda_polymer(const PairPotential& pot, double beta, const SimulationRegion& region, int n,
                                 const IntegrationConfig& cfg, int excess_order, int n_poly_max) {
  if (n < 1) throw ArgumentError("coefficient order must be >= 1");
  if (n > n_poly_max)
    throw CapacityError("polymer route limited to n <= " + std::to_string(n_poly_max));
  if (region.infinite) throw ArgumentError("polymer route needs a finite region");
  if (pot.is_zero()) return {0.0, 0.0};
  std::vector<double> w(n + 2, 0.0);
  double qerr = 0.0;
  for (int k = 2; k <= n + 1; ++k) {
    const auto r = polymer_weight(pot, beta, region, k, cfg);
    w[k] = r.value;
    qerr = std::max(qerr, r.error);
  }
  auto out = polymer_sum(n, w, region.volume(), excess_order);
  out.error = std::hypot(out.error, qerr);
  return out;
}

void fit_tail_envelope(ClusterTable& t) {
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= t.n_max; ++n) {
    const double v = std::abs(t.values[n - 1]) / (n + 1);
    if (v > 0.0 && std::isfinite(v)) pts.push_back({static_cast<double>(n), std::log(v)});
  }
  t.tail_fitted = false;
  t.tail_C = 0.0;
  t.tail_c = 0.0;
  if (pts.empty()) return;
  double c = 0.0;
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(pts.size());
    c = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  if (!(c > 0.0)) c = 0.0;
  double logC = -INFINITY;
  for (auto [x, y] : pts) logC = std::max(logC, y + c * x);
  t.tail_C = std::exp(logC);
  t.tail_c = c;
  t.tail_fitted = pts.size() >= 2 && c > 0.0;
}

ClusterTable compute_table(const PairPotential& pot, double beta, const SimulationRegion& region, int n_max,
                           TableMode mode, const IntegrationConfig& cfg, const TableOptions& opt) {
  if (n_max < 1) throw ArgumentError("n_max must be >= 1");
  if (mode == TableMode::oracle_fitted) throw ArgumentError("use fit_coefficients_from_oracle for fitted tables");
  if (mode == TableMode::infinite_volume && !region.infinite)
    throw ArgumentError("infinite-volume mode needs the infinite region");
  if (mode != TableMode::infinite_volume && region.infinite)
    throw ArgumentError("finite-volume modes need a finite region");
  ClusterTable t;
  t.beta = beta;
  t.region = region;
  t.n_max = n_max;
  t.mode = mode;
  t.potential = pot;
  t.seed = cfg.scheme == Scheme::monte_carlo || region.dim > 1 ? cfg.seed : 0;
  for (int n = 1; n <= n_max; ++n) {
    QuadratureValue r;
    std::string route;
    if (mode == TableMode::infinite_volume) {
      r = beta_n_infinite(pot, beta, n, region.dim, cfg);
      route = "infinite-volume";
    } else if (mode == TableMode::polymer_exact && n <= opt.n_poly_max) {
      r = b_lambda_polymer(pot, beta, region, n, cfg, opt.excess_order, opt.n_poly_max);
      route = "polymer";
    } else {
      r = b_lambda_2connected(pot, beta, region, n, cfg);
      route = "two-connected";
    }
    t.values.push_back(r.value);
    t.uncertainty.push_back(r.error);
    t.route.push_back(route);
  }
  t.c_beta = c_beta(pot, beta, region.dim, cfg).value;
  t.c0 = opt.c0 > 0.0 ? opt.c0 : default_c0(beta, pot.stability_B);
  fit_tail_envelope(t);
  return t;
}

}  // namespace clusterdev
