// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "clusterdev/integration.hpp"
#include "clusterdev/potentials.hpp"
#include "clusterdev/region.hpp"

namespace clusterdev {

enum class TableMode { polymer_exact, two_connected, infinite_volume, oracle_fitted };
std::string to_string(TableMode m);
TableMode table_mode_from_string(const std::string& s);

inline constexpr int kClusterTableSchema = 1;
inline constexpr int kPolymerMaxDefault = 3;

struct ClusterTable {
  double beta = 1.0;
  SimulationRegion region;
  int n_max = 0;
  TableMode mode = TableMode::two_connected;
  std::vector<double> values;       // values[n-1]
  std::vector<double> uncertainty;  // values[n-1]
  std::vector<std::string> route;   // how each row was obtained
  PairPotential potential;
  double c_beta = 0.0;
  double c0 = 1.0;
  // Envelope |B(n)|/(n+1) <= tail_C * exp(-tail_c * n) over the table rows.
  double tail_C = 0.0;
  double tail_c = 0.0;
  bool tail_fitted = false;
  std::uint64_t seed = 0;
  double fit_residual = 0.0;

  double value(int n) const;
  bool all_zero() const;
};

// beta_n: (1/n!) * sum over 2-connected graphs on n+1 vertices of the
// integral of prod f with x_1 = 0.
QuadratureValue beta_n_infinite(const PairPotential& pot, double beta, int n, int dim,
                                const IntegrationConfig& cfg = {});

// 2-connected graph sum with every coordinate in the box, divided by |Lambda| n!.
QuadratureValue b_lambda_2connected(const PairPotential& pot, double beta, const SimulationRegion& region,
                                    int n, const IntegrationConfig& cfg = {});

// |Lambda|^{k-1} * omega_Lambda(V) for |V| = k.
QuadratureValue polymer_weight(const PairPotential& pot, double beta, const SimulationRegion& region,
                               int k, const IntegrationConfig& cfg = {});

// Polymer sum for B_Lambda(n) given scaled weights w[k] = |Lambda|^{k-1} omega(k)
// (w indexed by k, entries 0 and 1 unused). Multi-indices are kept while
// sum_V I(V)(|V|-1) - n <= excess_order; the value of the last kept order is
// returned as the uncertainty.
QuadratureValue polymer_sum(int n, const std::vector<double>& w, double volume, int excess_order);

// Polymer-expansion B_Lambda(n) for n <= n_poly_max.
QuadratureValue b_lambda_polymer(const PairPotential& pot, double beta, const SimulationRegion& region,
                                 int n, const IntegrationConfig& cfg = {}, int excess_order = 6,
                                 int n_poly_max = kPolymerMaxDefault);

// c_I for a multiset of polymers given as vertex bitmasks with multiplicities.
double polymer_coefficient(const std::vector<std::uint32_t>& supports, const std::vector<int>& counts);

struct TableOptions {
  int n_poly_max = kPolymerMaxDefault;
  int excess_order = 6;
  double c0 = 0.0;  // <= 0: default_c0(beta, B)
};

ClusterTable compute_table(const PairPotential& pot, double beta, const SimulationRegion& region, int n_max,
                           TableMode mode, const IntegrationConfig& cfg = {}, const TableOptions& opt = {});

// Least squares for B(1..n_max) from log Z(N), N = 1..N_fit (log_z[N-1]).
ClusterTable fit_coefficients_from_oracle(const std::vector<double>& log_z, double beta,
                                          const SimulationRegion& region, int n_max,
                                          double max_condition = 1e12);

void fit_tail_envelope(ClusterTable& table);

struct DecayFit {
  double C = 0.0;
  double c = 0.0;
  double intercept = 0.0;  // least-squares log C before the envelope shift
  int points = 0;
  bool decays = false;
  double star_ratio = 0.0;
  bool violation = false;
  std::string reason;
};

// Least squares of log|F(n)| vs n at the reference density.
DecayFit decay_fit(const ClusterTable& table, double rho_reference);

nlohmann::json to_json(const ClusterTable& t);
ClusterTable table_from_json(const nlohmann::json& j);
void save_table(const ClusterTable& t, const std::string& path);
ClusterTable load_table(const std::string& path);

nlohmann::json potential_to_json(const PairPotential& p);
PairPotential potential_from_json(const nlohmann::json& j);

}  // namespace clusterdev
