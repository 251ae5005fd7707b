// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "clusterdev/cluster_coeffs.hpp"
#include "clusterdev/region.hpp"

namespace clusterdev {

// Warning flags carried by series results.
enum SeriesFlag : unsigned {
  kFlagNone = 0,
  kFlagStarViolated = 1u << 0,  // rho*C(beta)/c0 >= 1
  kFlagTailDiverges = 1u << 1,  // envelope ratio >= 1, tail bound infinite
  kFlagTailUnfitted = 1u << 2,  // envelope not decaying; bound is a guess
  kFlagBoundary = 1u << 3,      // maximizer on the scan boundary
  kFlagPrecision = 1u << 4,     // tail bound exceeds the leading term
};
std::string flags_to_string(unsigned flags);

struct SeriesValue {
  double value = 0.0;
  double tail = 0.0;
  unsigned flags = kFlagNone;
};

// (N-1)(N-2)...(N-n) / |Lambda|^n for n < N, else 0.
double p_poly(long N, double volume, int n);

// rho (rho - 1/|Lambda|) ... (rho - n/|Lambda|) for n/|Lambda| < rho, else 0.
// An infinite volume gives rho^{n+1}.
double script_p_poly(double rho, double volume, int n);
// m-th derivative in rho of the same piecewise polynomial.
double script_p_poly_derivative(double rho, double volume, int n, int m);

enum class StirlingPolicy { exact_ln_factorial, gamma_asymptotic };

// Remainder ln x! - (x ln x - x + ln sqrt(2 pi x)); lies in (0, 1/(12x)).
// Uses the Binet series for x >= 10.
double stirling_remainder(double x);
double ln_factorial(double x, StirlingPolicy policy = StirlingPolicy::exact_ln_factorial);

// S = (1/|Lambda|) ln[(rho|Lambda|)! (e/(rho|Lambda|))^{rho|Lambda|}] and its rho-derivative.
double stirling_s(double rho, double volume);
double stirling_s_prime(double rho, double volume);

class FreeEnergyModel {
 public:
  FreeEnergyModel(double beta, SimulationRegion region, ClusterTable table,
                  StirlingPolicy policy = StirlingPolicy::exact_ln_factorial);

  double beta() const { return beta_; }
  const SimulationRegion& region() const { return region_; }
  const ClusterTable& table() const { return table_; }
  StirlingPolicy policy() const { return policy_; }
  double volume() const { return region_.volume(); }
  double star_ratio(double rho) const;

 private:
  double beta_;
  SimulationRegion region_;
  ClusterTable table_;
  StirlingPolicy policy_;
};

// F(n) = P_{N,|Lambda|}(n) B(n) / (n+1).
double f_coefficient(const FreeEnergyModel& model, long N, int n);

SeriesValue log_z_canonical(const FreeEnergyModel& model, long N);
// -(beta |Lambda|)^{-1} log Z(N).
SeriesValue free_energy_f(const FreeEnergyModel& model, long N);

// Free energy density with the Stirling term removed, in energy units:
// (1/beta)[rho(log rho - 1) - sum_n P_{n+1}(rho) B(n)/(n+1)].
SeriesValue cal_f(const FreeEnergyModel& model, double rho);
SeriesValue cal_f_derivative(const FreeEnergyModel& model, double rho, int m);

// A particle-number ensemble: log Z(N) for N >= 0 plus the constants that
// bound Z(N) <= (|Lambda| e^{beta B})^N / N!.
struct Ensemble {
  double beta = 1.0;
  double volume = 1.0;
  double stability_B = 0.0;
  std::function<double(long)> log_z;
  std::string label;
};

Ensemble make_ensemble(const FreeEnergyModel& model);

struct GrandSum {
  double log_xi = 0.0;
  long n_max = 0;
  double truncation = 0.0;  // bound on the neglected relative mass
  std::vector<double> log_w;  // beta mu N + log Z(N), N = 0..n_max
};

inline constexpr double kGrandFloor = -30.0;

// First N past the peak with N(beta(mu+B) + ln|Lambda|) - ln N! < floor.
long n_max_particles(const Ensemble& ens, double mu, long hard_cap = 0);
GrandSum grand_sum(const Ensemble& ens, double mu, long hard_cap = 0);
// (beta |Lambda|)^{-1} log Xi(mu).
double pressure_grand(const Ensemble& ens, double mu);

}  // namespace clusterdev
