// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "clusterdev/duality.hpp"
#include "clusterdev/thermo.hpp"

namespace clusterdev {

inline constexpr int kDeviationReportSchema = 1;

enum class Center { n_bar, n_star };
std::string to_string(Center c);

struct DeviationSpec {
  double alpha = 0.5;
  double u = 0.0;
  Center center = Center::n_star;
  long center_N = 0;
  long N_tilde = 0;
  double effective_u = 0.0;  // (N_tilde - center_N) / |Lambda|^alpha
};

// alpha = 1 centers on N_bar, alpha < 1 on N*; N_tilde = center + round(u |Lambda|^alpha).
DeviationSpec make_deviation(const FreeEnergyModel& model, const DualityPoint& dp, double alpha, double u);

// Smallest m with m(1 - alpha) - 1 > 0; alpha in [1/2, 1).
int m_alpha(double alpha);

// beta [f^GC(rho~) - f^GC(rho_bar) - mu0 (rho~ - rho_bar)].
double rate_i_gc(const Ensemble& ens, double rho_tilde, double rho_bar, double mu0);

// [beta F''(rho*)]^{-1}.
double variance_d(const FreeEnergyModel& model, double rho_star);

enum class DVariant { plain, plus, minus };
std::string to_string(DVariant v);
double variance_d_alpha(const FreeEnergyModel& model, double rho_star, double alpha, double u_eff, DVariant variant);

struct ErrorTerm {
  double value = 0.0;
  double tail = 0.0;
  bool precision_warning = false;
  double total() const { return value + tail; }
};

// Expansion error of log J around rho* for N = N* + v |Lambda|^alpha.
// Terms up to m_trunc (default m(alpha) + 6, raised to cover every
// polynomial term of the table) are summed; the entropy remainder beyond is
// bounded geometrically.
ErrorTerm error_e(const FreeEnergyModel& model, double alpha, double v, double rho_star, double mu0, int m_trunc = 0);

// log J = beta mu (N - N_ref) + log Z(N) - log Z(N_ref).
double log_j(const Ensemble& ens, double mu, long N, long N_ref);

struct JExpansion {
  double v = 0.0;
  double log_j = 0.0;
  double gaussian = 0.0;        // -v^2 |Lambda|^{2 alpha - 1} / (2 D^alpha)
  double stirling_exact = 0.0;  // -|Lambda| [S(rho) - S(rho*)]
  double stirling_paper = 0.0;  // +|Lambda| S(rho*)
  double remainder = 0.0;       // log_j - gaussian - stirling_exact
  ErrorTerm e;
  bool sandwich = false;        // |remainder| <= E
  bool paper_sandwich = false;  // |log_j - gaussian - stirling_paper| <= E
};

JExpansion j_expansion(const FreeEnergyModel& model, const Ensemble& ens, double mu0, long N, long N_star,
                       double alpha);

// log K(mu, N_ref) = -log sum_N J(N, N_ref).
double log_k(const Ensemble& ens, double mu, long N_ref);

struct KCheck {
  double log_k = 0.0;
  double log_sum_j = 0.0;
  double identity_residual = 0.0;  // |K sum J - 1|
  double v = 0.0;
  double scaled = 0.0;  // K sqrt(2 pi D^{alpha,+} |Lambda|)
  ErrorTerm e;
  double lo = 0.0;
  double hi = 0.0;
  bool inside = false;
};

// K(mu0, N*) against [1/(1+E), 1/(1-E)] / sqrt(2 pi D^{alpha,+} |Lambda|).
// v_k <= 0 selects the 3 sigma window 3 sqrt(D) |Lambda|^{1/2 - alpha}.
KCheck k_check(const FreeEnergyModel& model, const Ensemble& ens, double mu0, long N_star, double alpha,
               double v_k = 0.0);

struct DeviationReport {
  DeviationSpec spec;
  std::string kind;  // precise-ld | moderate | lclt
  double volume = 0.0;
  double mu0 = 0.0;
  double rate = 0.0;
  double D = 0.0;  // D for alpha = 1, D^alpha otherwise
  double D_plus = NAN;
  double D_minus = NAN;
  int m_alpha = 0;
  double E = NAN;    // literal theorem error term
  double E_J = NAN;  // bound on |log J - gaussian|
  double E_K = NAN;  // bound on |log(K sqrt(2 pi D+ |Lambda|))|
  double estimate = 0.0;
  double theorem_bound = NAN;  // literal right-hand side
  double budget = NAN;         // combined absolute error budget
  double band_lo = NAN;
  double band_hi = NAN;
  double oracle = NAN;
  double oracle_residual = NAN;
  bool has_oracle = false;
  bool within_budget = false;
  double theorem_constant = NAN;
  double mu_tilde = NAN;
  long N_tilde_star = -1;
  long n_gap = 0;  // |N_tilde - N_tilde*|
  double series_tail = 0.0;
  std::vector<std::string> warnings;
};

// Theorem 1 estimate at alpha = 1. theorem_constant NaN leaves the budget unset.
DeviationReport precise_ld(const FreeEnergyModel& model, double mu0, double u, const Ensemble* oracle = nullptr,
                           double theorem_constant = NAN);
DeviationReport moderate_dev(const FreeEnergyModel& model, double mu0, double u, double alpha,
                             const Ensemble* oracle = nullptr);
DeviationReport lclt(const FreeEnergyModel& model, double mu0, double u, const Ensemble* oracle = nullptr);

// J(N~, N*) K(mu0, N*) from the model's own partition functions.
struct Option2 {
  double log_j = 0.0;
  double log_k = 0.0;
  double probability = 0.0;
};
Option2 option2(const Ensemble& ens, double mu0, long N_tilde, long N_star);

// beta [f(rho~) - f(rho0) - f'(rho0)(rho~ - rho0)].
double rate_i_infinite(const InfiniteVolumeModel& model, double rho_tilde, double rho0);

// Probability mass of the index sets around N*: the window
// |N - N*| <= v |Lambda|^alpha, the ring up to v' |Lambda|^delta (only when
// alpha <= (2d-1)/2d), and the rest.
struct RegionMasses {
  bool split = false;
  double inner = 0.0;
  double intermediate = 0.0;
  double outer = 0.0;
};
RegionMasses lemma_region_masses(const Ensemble& ens, double mu0, long N_star, double alpha, double v, double delta,
                                 double v_prime, int dim);

struct CalibrationPoint {
  double volume = 0.0;
  double estimate = 0.0;
  double oracle = 0.0;
};
// max |oracle - estimate| |Lambda| / estimate, times the safety factor.
double calibrate_theorem_constant(const std::vector<CalibrationPoint>& points, double safety = 1.5);

nlohmann::json to_json(const DeviationReport& r);
std::vector<std::string> deviation_csv_header();
std::vector<std::string> deviation_csv_row(const DeviationReport& r);

}  // namespace clusterdev
