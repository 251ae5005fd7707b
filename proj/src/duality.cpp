// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include "clusterdev/duality.hpp"

#include <cmath>

#include "clusterdev/errors.hpp"

namespace clusterdev {

namespace {

struct Moments {
  double mean = 0.0;  // E[N]
  double var = 0.0;   // Var[N]
};

Moments moments(const GrandSum& gs) {
  Moments m;
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t N = 0; N < gs.log_w.size(); ++N) {
    const double w = std::exp(gs.log_w[N] - gs.log_xi);
    s0 += w;
    s1 += w * static_cast<double>(N);
  }
  m.mean = s1 / s0;
  double s2 = 0.0;
  for (std::size_t N = 0; N < gs.log_w.size(); ++N) {
    const double d = static_cast<double>(N) - m.mean;
    s2 += std::exp(gs.log_w[N] - gs.log_xi) * d * d;
  }
  m.var = s2 / s0;
  return m;
}

long floor_count(double x) { return static_cast<long>(std::floor(x + 1e-9)); }

}  // namespace

MeanDensity mean_density(const Ensemble& ens, double mu0, bool check_derivative) {
  const GrandSum gs = grand_sum(ens, mu0);
  MeanDensity out;
  out.rho_bar = moments(gs).mean / ens.volume;
  out.N_bar = floor_count(out.rho_bar * ens.volume);
  if (check_derivative && out.rho_bar > 0.0) {
    const double h = 1e-4;
    const double d = (pressure_grand(ens, mu0 + h) - pressure_grand(ens, mu0 - h)) / (2.0 * h);
    out.derivative_residual = std::abs(d - out.rho_bar) / out.rho_bar;
  }
  return out;
}

double variance_sigma2(const Ensemble& ens, double mu0) {
  return moments(grand_sum(ens, mu0)).var / ens.volume;
}

VarianceCheck variance_check(const Ensemble& ens, double mu0) {
  VarianceCheck v;
  v.sigma2 = variance_sigma2(ens, mu0);
  const double h = 1e-3;
  const double pp = pressure_grand(ens, mu0 + h);
  const double p0 = pressure_grand(ens, mu0);
  const double pm = pressure_grand(ens, mu0 - h);
  v.fd_sigma2 = (pp - 2.0 * p0 + pm) / (h * h) / ens.beta;
  v.rel_residual = std::abs(v.fd_sigma2 - v.sigma2) / v.sigma2;
  return v;
}

NStar find_n_star(const Ensemble& ens, double mu) {
  const GrandSum gs = grand_sum(ens, mu);
  NStar out;
  double best = -INFINITY;
  for (std::size_t N = 0; N < gs.log_w.size(); ++N) {
    const double w = gs.log_w[N];
    if (w >= best - 1e-12 * std::max(1.0, std::abs(best))) {
      best = std::max(best, w);
      out.N = static_cast<long>(N);
    }
  }
  out.boundary = out.N == gs.n_max;
  return out;
}

double find_mu_tilde(const Ensemble& ens, double rho_target, double mu_hint) {
  if (!(rho_target > 0.0)) throw DomainError("target density must be > 0");
  auto rho_at = [&](double mu) { return moments(grand_sum(ens, mu)).mean / ens.volume; };
  double w = 0.5;
  double lo = mu_hint - w, hi = mu_hint + w;
  double r_lo = rho_at(lo), r_hi = rho_at(hi);
  while (!(r_lo <= rho_target && rho_target <= r_hi)) {
    w *= 2.0;
    if (w > 10.0) throw RangeError("no bracket for mu~ within half-width 10 of " + std::to_string(mu_hint));
    if (r_lo > rho_target) {
      lo = mu_hint - w;
      r_lo = rho_at(lo);
    }
    if (r_hi < rho_target) {
      hi = mu_hint + w;
      r_hi = rho_at(hi);
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = rho_at(mid);
    if (r == rho_target) return mid;
    (r < rho_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gc_free_energy(const Ensemble& ens, double rho, double mu_hint) {
  const double mu = find_mu_tilde(ens, rho, mu_hint);
  return mu * rho - pressure_grand(ens, mu);
}

double gc_free_energy_second(const Ensemble& ens, double rho, double mu_hint, double h) {
  const double fp = gc_free_energy(ens, rho + h, mu_hint);
  const double f0 = gc_free_energy(ens, rho, mu_hint);
  const double fm = gc_free_energy(ens, rho - h, mu_hint);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

double log_mgf(const Ensemble& ens, double mu0, double mu) {
  return grand_sum(ens, mu + mu0).log_xi - grand_sum(ens, mu0).log_xi;
}

double log_mgf_direct(const Ensemble& ens, double mu0, double mu) {
  const GrandSum gs = grand_sum(ens, mu0);
  // Extend the support so the tilted measure is also captured.
  const long n_top = std::max(gs.n_max, n_max_particles(ens, mu + mu0));
  double peak = -INFINITY;
  std::vector<double> t(n_top + 1);
  for (long N = 0; N <= n_top; ++N) {
    const double lp = ens.beta * mu0 * N + ens.log_z(N) - gs.log_xi;
    t[N] = lp + ens.beta * mu * N;
    peak = std::max(peak, t[N]);
  }
  double acc = 0.0;
  for (double x : t) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

DualityPoint duality_point(const Ensemble& ens, double mu0, const FreeEnergyModel* model) {
  DualityPoint p;
  p.mu0 = mu0;
  const GrandSum gs = grand_sum(ens, mu0);
  p.n_max = gs.n_max;
  p.truncation = gs.truncation;
  const MeanDensity md = mean_density(ens, mu0);
  p.rho_bar = md.rho_bar;
  p.N_bar = md.N_bar;
  p.density_derivative_residual = md.derivative_residual;
  const VarianceCheck vc = variance_check(ens, mu0);
  p.sigma2 = vc.sigma2;
  p.variance_fd_residual = vc.rel_residual;
  const NStar ns = find_n_star(ens, mu0);
  p.N_star = ns.N;
  p.n_star_boundary = ns.boundary;
  p.rho_star = static_cast<double>(ns.N) / ens.volume;
  if (model != nullptr && ns.N >= 1 && p.rho_star < 1.0) {
    const double fp = cal_f_derivative(*model, p.rho_star, 1).value;
    const double sp = stirling_s_prime(p.rho_star, ens.volume) / ens.beta;
    p.mu_consistency_residual = std::abs(mu0 - fp - sp);
  }
  return p;
}

nlohmann::json to_json(const DualityPoint& p) {
  return {{"schema", "clusterdev.duality_point"},
          {"schema_version", kDualityPointSchema},
          {"mu0", p.mu0},
          {"rho_bar", p.rho_bar},
          {"N_bar", p.N_bar},
          {"sigma2", p.sigma2},
          {"N_star", p.N_star},
          {"rho_star", p.rho_star},
          {"mu_consistency_residual", std::isnan(p.mu_consistency_residual) ? nlohmann::json(nullptr)
                                                                             : nlohmann::json(p.mu_consistency_residual)},
          {"density_derivative_residual", p.density_derivative_residual},
          {"variance_fd_residual", p.variance_fd_residual},
          {"n_star_boundary", p.n_star_boundary},
          {"n_max", p.n_max},
          {"truncation", p.truncation}};
}

InfiniteVolumeModel::InfiniteVolumeModel(double beta, ClusterTable table) : beta_(beta), table_(std::move(table)) {
  if (!(beta_ > 0.0)) throw ArgumentError("beta must be > 0");
  if (!table_.region.infinite) throw ArgumentError("infinite-volume model needs an infinite-volume table");
  if (std::abs(table_.beta - beta_) > 1e-12 * beta_) throw ArgumentError("cluster table beta does not match");
}

double InfiniteVolumeModel::f_derivative(double rho, int m) const {
  if (!(rho > 0.0)) throw DomainError("density must be > 0");
  double entropy;
  if (m == 0)
    entropy = rho * (std::log(rho) - 1.0);
  else if (m == 1)
    entropy = std::log(rho);
  else
    entropy = ((m % 2 == 0) ? 1.0 : -1.0) * std::tgamma(m - 1.0) / std::pow(rho, m - 1);
  double inter = 0.0;
  for (int n = 1; n <= table_.n_max; ++n) {
    const int deg = n + 1;
    if (m > deg) continue;
    double fall = 1.0;
    for (int k = 0; k < m; ++k) fall *= deg - k;
    inter += fall * std::pow(rho, deg - m) * table_.values[n - 1] / (n + 1);
  }
  return (entropy - inter) / beta_;
}

double InfiniteVolumeModel::rho_of_mu(double mu) const {
  // f' is increasing while f'' > 0; find the edge of that window first.
  double hi = 1.0 - 1e-9;
  for (double r = 1e-3; r < 1.0; r += 1e-3) {
    if (f_derivative(r, 2) <= 0.0) {
      hi = r - 1e-3;
      break;
    }
  }
  double lo_log = std::log(1e-300), hi_log = std::log(hi);
  if (mu > mu_of_rho(hi)) throw RangeError("mu beyond the convex window of the series free energy");
  for (int it = 0; it < 200 && hi_log - lo_log > 1e-15; ++it) {
    const double mid = 0.5 * (lo_log + hi_log);
    (mu_of_rho(std::exp(mid)) < mu ? lo_log : hi_log) = mid;
  }
  return std::exp(0.5 * (lo_log + hi_log));
}

double InfiniteVolumeModel::pressure(double mu) const {
  const double rho = rho_of_mu(mu);
  return mu * rho - f(rho);
}

double InfiniteVolumeModel::pressure_series(double rho) const {
  double s = rho;
  for (int n = 1; n <= table_.n_max; ++n) s -= n * table_.values[n - 1] * std::pow(rho, n + 1) / (n + 1);
  return s / beta_;
}

double InfiniteVolumeModel::legendre_of_pressure(double rho) const {
  const double c = mu_of_rho(rho);
  double a = c - 1.0, b = c + 1.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto obj = [&](double mu) { return mu * rho - pressure(mu); };
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = obj(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = obj(x1);
    }
  }
  return obj(0.5 * (a + b));
}

double InfiniteVolumeModel::rho0(double mu0) const {
  const double h = 1e-5;
  return (pressure(mu0 + h) - pressure(mu0 - h)) / (2.0 * h);
}

double InfiniteVolumeModel::sigma2(double rho) const { return 1.0 / (beta_ * f_derivative(rho, 2)); }

void InfiniteVolumeModel::require_convergent(double rho) const {
  if (table_.all_zero()) return;
  DecayFit fit;
  try {
    fit = decay_fit(table_, rho);
  } catch (const FitError&) {
    return;
  }
  if (fit.violation) throw RegimeError("series does not converge at rho = " + std::to_string(rho) + ": " + fit.reason);
}

}  // namespace clusterdev
