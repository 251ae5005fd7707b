// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "json.hpp"

#include "clusterdev/cluster_coeffs.hpp"
#include "clusterdev/thermo.hpp"

namespace clusterdev {

inline constexpr int kDualityPointSchema = 1;

struct MeanDensity {
  double rho_bar = 0.0;  // unfloored grand-canonical mean density
  long N_bar = 0;        // floor(rho_bar |Lambda|)
  double derivative_residual = 0.0;  // |dp/dmu - rho_bar| / rho_bar by central differences
};

MeanDensity mean_density(const Ensemble& ens, double mu0, bool check_derivative = true);

struct VarianceCheck {
  double sigma2 = 0.0;
  double fd_sigma2 = 0.0;  // beta^{-1} p''(mu) by central differences
  double rel_residual = 0.0;
};

double variance_sigma2(const Ensemble& ens, double mu0);
VarianceCheck variance_check(const Ensemble& ens, double mu0);

struct NStar {
  long N = 0;
  bool boundary = false;
};

// argmax_N of beta mu N + log Z(N) over [0, N_max]. Near-ties (relative
// 1e-12) resolve to the larger N.
NStar find_n_star(const Ensemble& ens, double mu);

// mu with rho_bar(mu) = rho_target, by bracket doubling around mu_hint up to
// half-width 10 and bisection.
double find_mu_tilde(const Ensemble& ens, double rho_target, double mu_hint);
inline double find_mu_tilde_count(const Ensemble& ens, long N_tilde, double mu_hint) {
  return find_mu_tilde(ens, static_cast<double>(N_tilde) / ens.volume, mu_hint);
}

// f^GC(rho) = mu~ rho - p(mu~), energy units.
double gc_free_energy(const Ensemble& ens, double rho, double mu_hint);
// Second derivative by central differences of gc_free_energy.
double gc_free_energy_second(const Ensemble& ens, double rho, double mu_hint, double h = 1e-3);

// L(mu) = beta |Lambda| [p(mu + mu0) - p(mu0)] and the direct
// log E[e^{beta mu N}] under the mu0 measure.
double log_mgf(const Ensemble& ens, double mu0, double mu);
double log_mgf_direct(const Ensemble& ens, double mu0, double mu);

struct DualityPoint {
  double mu0 = 0.0;
  double rho_bar = 0.0;
  long N_bar = 0;
  double sigma2 = 0.0;
  long N_star = 0;
  double rho_star = 0.0;
  double mu_consistency_residual = NAN;  // |mu0 - F'(rho*) - S'(rho*)/beta|
  double density_derivative_residual = 0.0;
  double variance_fd_residual = 0.0;
  bool n_star_boundary = false;
  long n_max = 0;
  double truncation = 0.0;
};

DualityPoint duality_point(const Ensemble& ens, double mu0, const FreeEnergyModel* model = nullptr);
nlohmann::json to_json(const DualityPoint& p);

// Infinite-volume free energy from the beta_n series and its Legendre pair.
class InfiniteVolumeModel {
 public:
  InfiniteVolumeModel(double beta, ClusterTable table);

  double beta() const { return beta_; }
  const ClusterTable& table() const { return table_; }

  // f_beta and derivatives, energy units.
  double f(double rho) const { return f_derivative(rho, 0); }
  double f_derivative(double rho, int m) const;
  double mu_of_rho(double rho) const { return f_derivative(rho, 1); }
  double rho_of_mu(double mu) const;
  // p_beta(mu) = sup_rho {mu rho - f(rho)}.
  double pressure(double mu) const;
  // (1/beta)(rho - sum_n n beta_n rho^{n+1}/(n+1)).
  double pressure_series(double rho) const;
  // sup_mu {mu rho - p(mu)} by golden-section search over mu.
  double legendre_of_pressure(double rho) const;
  // p'(mu0) by central differences with h = 1e-5.
  double rho0(double mu0) const;
  // 1 / (beta f''(rho)).
  double sigma2(double rho) const;
  // Throws RegimeError when the series does not decay at rho.
  void require_convergent(double rho) const;

 private:
  double beta_;
  ClusterTable table_;
};

}  // namespace clusterdev
