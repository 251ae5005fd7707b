// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include "clusterdev/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "clusterdev/errors.hpp"
#include "clusterdev/kernels/gauss_legendre.hpp"

namespace clusterdev {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::hard_core: return "hard-core";
    case PotentialKind::square_well: return "square-well";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& s) {
  if (s == "zero" || s == "ideal") return PotentialKind::zero;
  if (s == "hard-core" || s == "hard_core" || s == "hard-rod") return PotentialKind::hard_core;
  if (s == "square-well" || s == "square_well") return PotentialKind::square_well;
  if (s == "tabulated" || s == "tabulated-radial") return PotentialKind::tabulated;
  throw ArgumentError("unknown potential kind '" + s + "'");
}

PairPotential PairPotential::zero() { return {}; }

PairPotential PairPotential::hard_rod(double a) {
  PairPotential p;
  p.kind = PotentialKind::hard_core;
  p.hard_core_radius = a;
  p.range = a;
  p.validate();
  return p;
}

PairPotential PairPotential::square_well(double a, double R, double depth) {
  PairPotential p;
  p.kind = PotentialKind::square_well;
  p.hard_core_radius = a;
  p.range = R;
  p.well_depth = depth;
  // In d = 1 a particle has at most floor(R/a) partners on each side.
  p.stability_B = a > 0.0 ? std::floor(R / a) * std::max(depth, 0.0) : 0.0;
  p.validate();
  return p;
}

PairPotential PairPotential::tabulated(double a, std::vector<double> r, std::vector<double> v) {
  PairPotential p;
  p.kind = PotentialKind::tabulated;
  p.hard_core_radius = a;
  p.tab_r = std::move(r);
  p.tab_v = std::move(v);
  if (!p.tab_r.empty()) p.range = p.tab_r.back();
  double depth = 0.0;
  for (double x : p.tab_v) depth = std::max(depth, -x);
  p.stability_B = depth;  // caller should override for dense attractive tables
  p.validate();
  return p;
}

void PairPotential::validate() const {
  if (!(hard_core_radius >= 0.0)) throw ArgumentError("hard_core_radius must be >= 0");
  if (!(range >= 0.0)) throw ArgumentError("interaction range must be >= 0");
  if (!(stability_B >= 0.0)) throw ArgumentError("stability_B must be >= 0");
  switch (kind) {
    case PotentialKind::zero: break;
    case PotentialKind::hard_core:
      if (!(hard_core_radius > 0.0)) throw ArgumentError("hard core needs a > 0");
      if (range < hard_core_radius) throw ArgumentError("range must be >= hard core radius");
      break;
    case PotentialKind::square_well:
      if (!(range > hard_core_radius)) throw ArgumentError("square well needs R > a");
      break;
    case PotentialKind::tabulated:
      if (tab_r.size() < 2 || tab_r.size() != tab_v.size())
        throw ArgumentError("tabulated potential needs matching r/v samples (>= 2)");
      if (std::abs(tab_r.front() - hard_core_radius) > 1e-12)
        throw ArgumentError("tabulation must start at the hard core radius");
      for (std::size_t i = 1; i < tab_r.size(); ++i)
        if (!(tab_r[i] > tab_r[i - 1])) throw ArgumentError("tabulation radii must increase");
      for (double v : tab_v)
        if (!std::isfinite(v)) throw ArgumentError("tabulated energies must be finite");
      break;
  }
}

bool PairPotential::piecewise_constant() const { return kind != PotentialKind::tabulated; }

bool PairPotential::pure_hard_core() const {
  return kind == PotentialKind::hard_core ||
         (kind == PotentialKind::square_well && well_depth == 0.0);
}

std::vector<double> PairPotential::breakpoints() const {
  std::vector<double> b;
  if (hard_core_radius > 0.0) b.push_back(hard_core_radius);
  if (kind == PotentialKind::square_well && well_depth != 0.0) b.push_back(range);
  if (kind == PotentialKind::tabulated)
    for (double r : tab_r)
      if (r > 0.0) b.push_back(r);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::abs(x - y) < 1e-14; }),
          b.end());
  return b;
}

double PairPotential::max_attraction() const {
  if (kind == PotentialKind::square_well) return std::max(well_depth, 0.0);
  if (kind == PotentialKind::tabulated) {
    double d = 0.0;
    for (double v : tab_v) d = std::max(d, -v);
    return d;
  }
  return 0.0;
}

double evaluate_radial(const PairPotential& pot, double r) {
  r = std::abs(r);
  switch (pot.kind) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::hard_core: return r < pot.hard_core_radius ? kInfiniteEnergy : 0.0;
    case PotentialKind::square_well:
      if (r < pot.hard_core_radius) return kInfiniteEnergy;
      return r <= pot.range ? -pot.well_depth : 0.0;
    case PotentialKind::tabulated: {
      if (r < pot.hard_core_radius) return kInfiniteEnergy;
      if (r > pot.range) return 0.0;
      auto it = std::upper_bound(pot.tab_r.begin(), pot.tab_r.end(), r);
      if (it == pot.tab_r.end()) return pot.tab_v.back();
      const std::size_t i = static_cast<std::size_t>(it - pot.tab_r.begin());
      if (i == 0) return pot.tab_v.front();
      const double t = (r - pot.tab_r[i - 1]) / (pot.tab_r[i] - pot.tab_r[i - 1]);
      return pot.tab_v[i - 1] + t * (pot.tab_v[i] - pot.tab_v[i - 1]);
    }
  }
  return 0.0;
}

namespace {
double norm(std::span<const double> x, int dim) {
  if (dim < 1 || static_cast<int>(x.size()) != dim)
    throw ArgumentError("displacement dimension mismatch");
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}
}  // namespace

double evaluate(const PairPotential& pot, std::span<const double> displacement, int dim) {
  return evaluate_radial(pot, norm(displacement, dim));
}

double mayer_f_radial(const PairPotential& pot, double beta, double r) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be > 0");
  const double v = evaluate_radial(pot, r);
  if (v == kInfiniteEnergy) return -1.0;
  return std::expm1(-beta * v);
}

double mayer_f(const PairPotential& pot, double beta, std::span<const double> displacement,
               int dim) {
  return mayer_f_radial(pot, beta, norm(displacement, dim));
}

QuadratureValue c_beta(const PairPotential& pot, double beta, int dim, const IntegrationConfig& cfg) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be > 0");
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  if (pot.is_zero()) return {0.0, 0.0};
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  std::vector<double> cuts{0.0};
  for (double b : pot.breakpoints()) cuts.push_back(b);
  if (cuts.back() < pot.range) cuts.push_back(pot.range);

  auto run = [&](int npts) {
    const auto& rule = kernels::gauss_legendre(npts);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      s += kernels::integrate_interval(rule, cuts[i], cuts[i + 1], [&](double r) {
        return std::abs(mayer_f_radial(pot, beta, r)) * std::pow(r, dim - 1);
      });
    return area * s;
  };
  const int p = std::max(cfg.points > 0 ? cfg.points : 16, dim);
  const double v1 = run(p), v2 = run(p + 8);
  QuadratureValue out{v2, std::abs(v2 - v1)};
  if (out.error > std::max(cfg.rel_tol * std::abs(out.value), 1e-14))
    throw IntegrationError("c_beta quadrature did not converge");
  return out;
}

StarCheck check_condition_star(double rho, double c_beta_value, double c0) {
  if (!(rho >= 0.0)) throw ArgumentError("density must be >= 0");
  if (!(c0 > 0.0)) throw ArgumentError("c0 must be > 0");
  const double ratio = rho * c_beta_value / c0;
  return {ratio < 1.0, ratio};
}

double default_c0(double beta, double stability_B) { return std::exp(-2.0 * beta * stability_B - 1.0); }

StabilityReport verify_stability(const PairPotential& pot, int dim, int n_max,
                                 std::uint64_t samples_per_n, std::uint64_t seed) {
  StabilityReport rep;
  if (pot.is_zero()) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double a = pot.hard_core_radius;
  const double reach = std::max(pot.range, 1e-3);
  std::vector<double> q;
  std::vector<double> dir(dim);
  for (int n = 2; n <= n_max; ++n) {
    q.assign(static_cast<std::size_t>(n) * dim, 0.0);
    for (std::uint64_t s = 0; s < samples_per_n; ++s) {
      // Grow a cluster: each new particle sits at distance in [a, R] from an
      // earlier one, which favours configurations with many bonds.
      for (int i = 1; i < n; ++i) {
        const int j = static_cast<int>(unit(rng) * i);
        double nr = 0.0;
        for (int k = 0; k < dim; ++k) {
          dir[k] = gauss(rng);
          nr += dir[k] * dir[k];
        }
        nr = std::sqrt(nr);
        const double r = (s % 4 == 0) ? reach * n * unit(rng) : a + (reach - a) * unit(rng);
        for (int k = 0; k < dim; ++k) q[i * dim + k] = q[j * dim + k] + r * dir[k] / nr;
      }
      double h = 0.0;
      for (int i = 0; i < n && h != kInfiniteEnergy; ++i)
        for (int j = i + 1; j < n; ++j) {
          double d2 = 0.0;
          for (int k = 0; k < dim; ++k) {
            const double d = q[i * dim + k] - q[j * dim + k];
            d2 += d * d;
          }
          const double v = evaluate_radial(pot, std::sqrt(d2));
          if (v == kInfiniteEnergy) {
            h = kInfiniteEnergy;
            break;
          }
          h += v;
        }
      ++rep.configurations;
      if (h == kInfiniteEnergy) continue;
      const double per = -h / n;
      if (per > rep.worst_energy_per_particle) {
        rep.worst_energy_per_particle = per;
        rep.worst_n = n;
      }
      if (h < -pot.stability_B * n - 1e-12) rep.ok = false;
    }
  }
  return rep;
}

}  // namespace clusterdev
