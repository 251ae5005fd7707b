// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clusterdev/integration.hpp"

namespace clusterdev {

enum class PotentialKind { zero, hard_core, square_well, tabulated };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& s);

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

// Radial pair potential with finite range. Tabulated potentials are
// piecewise linear between samples on [hard_core_radius, range].
struct PairPotential {
  PotentialKind kind = PotentialKind::zero;
  double hard_core_radius = 0.0;
  double range = 0.0;
  double well_depth = 0.0;
  double stability_B = 0.0;
  std::vector<double> tab_r;
  std::vector<double> tab_v;

  static PairPotential zero();
  static PairPotential hard_rod(double a);
  static PairPotential square_well(double a, double R, double depth);
  static PairPotential tabulated(double a, std::vector<double> r, std::vector<double> v);

  void validate() const;
  bool is_zero() const { return kind == PotentialKind::zero; }
  // f takes finitely many values (hard core, square well).
  bool piecewise_constant() const;
  // f only takes the values -1 and 0.
  bool pure_hard_core() const;
  // Radii where f jumps or where the tabulation has a kink.
  std::vector<double> breakpoints() const;
  // Largest attractive depth, bounding f from above by e^{beta*depth}-1.
  double max_attraction() const;
};

double evaluate_radial(const PairPotential& pot, double r);
double evaluate(const PairPotential& pot, std::span<const double> displacement, int dim);

double mayer_f_radial(const PairPotential& pot, double beta, double r);
double mayer_f(const PairPotential& pot, double beta, std::span<const double> displacement,
               int dim);

// Integral of |e^{-beta V(x)} - 1| over R^d by radial Gauss-Legendre
// quadrature split at every breakpoint.
QuadratureValue c_beta(const PairPotential& pot, double beta, int dim,
                       const IntegrationConfig& cfg = {});

struct StarCheck {
  bool ok = true;
  double ratio = 0.0;  // rho*C(beta)/c0
};

StarCheck check_condition_star(double rho, double c_beta_value, double c0);

double default_c0(double beta, double stability_B);

struct StabilityReport {
  bool ok = true;
  int worst_n = 0;
  // max over sampled configurations of -H / n
  double worst_energy_per_particle = 0.0;
  std::uint64_t configurations = 0;
};

// Samples dense configurations of n = 2..n_max particles and checks
// H(q) >= -B n.
StabilityReport verify_stability(const PairPotential& pot, int dim, int n_max = 6,
                                 std::uint64_t samples_per_n = 20000, std::uint64_t seed = 7);

}  // namespace clusterdev
