// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include "clusterdev/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>

#include "clusterdev/errors.hpp"

namespace clusterdev {

std::string flags_to_string(unsigned flags) {
  if (flags == kFlagNone) return "none";
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (!(flags & bit)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(kFlagStarViolated, "star");
  add(kFlagTailDiverges, "tail-diverges");
  add(kFlagTailUnfitted, "tail-unfitted");
  add(kFlagBoundary, "boundary");
  add(kFlagPrecision, "precision");
  return out;
}

double p_poly(long N, double volume, int n) {
  if (n < 1 || !(volume > 0.0)) throw ArgumentError("p_poly needs n >= 1 and volume > 0");
  if (N <= n) return 0.0;
  double p = 1.0;
  for (int k = 1; k <= n; ++k) p *= static_cast<double>(N - k) / volume;
  return p;
}

namespace {

// Elementary symmetric polynomials e_0..e_k of the factors of P_{n+1}.
std::vector<double> factor_symmetric(double rho, double volume, int n) {
  std::vector<double> e(n + 2, 0.0);
  e[0] = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double y = std::isinf(volume) ? rho : rho - i / volume;
    for (int k = i + 1; k >= 1; --k) e[k] += e[k - 1] * y;
  }
  return e;
}

bool script_p_active(double rho, double volume, int n) {
  return std::isinf(volume) || n / volume < rho;
}

double falling(double x, int m) {
  double r = 1.0;
  for (int k = 0; k < m; ++k) r *= x - k;
  return r;
}

}  // namespace

double script_p_poly(double rho, double volume, int n) {
  if (n < 1 || !(volume > 0.0)) throw ArgumentError("script_p_poly needs n >= 1 and volume > 0");
  if (!script_p_active(rho, volume, n)) return 0.0;
  double p = rho;
  for (int k = 1; k <= n; ++k) p *= std::isinf(volume) ? rho : rho - k / volume;
  return p;
}

double script_p_poly_derivative(double rho, double volume, int n, int m) {
  if (m == 0) return script_p_poly(rho, volume, n);
  if (m < 0) throw ArgumentError("derivative order must be >= 0");
  const int deg = n + 1;
  if (m > deg || !script_p_active(rho, volume, n)) return 0.0;
  const auto e = factor_symmetric(rho, volume, n);
  return std::tgamma(m + 1.0) * e[deg - m];
}

double stirling_remainder(double x) {
  if (!(x > 0.0)) throw ArgumentError("stirling remainder needs x > 0");
  if (x >= 10.0) {
    const double x2 = x * x;
    const double inv = 1.0 / x;
    const double inv2 = 1.0 / x2;
    return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
  }
  return std::lgamma(x + 1.0) - (x * std::log(x) - x + 0.5 * std::log(2.0 * M_PI * x));
}

double ln_factorial(double x, StirlingPolicy policy) {
  if (x < 0.0) throw ArgumentError("ln_factorial needs x >= 0");
  if (x == 0.0) return 0.0;
  if (policy == StirlingPolicy::exact_ln_factorial || x < 10.0) return std::lgamma(x + 1.0);
  return x * std::log(x) - x + 0.5 * std::log(2.0 * M_PI * x) + stirling_remainder(x);
}

double stirling_s(double rho, double volume) {
  const double x = rho * volume;
  if (!(x >= 1.0)) throw DomainError("stirling_s needs rho*|Lambda| >= 1");
  return (std::lgamma(x + 1.0) + x - x * std::log(x)) / volume;
}

double stirling_s_prime(double rho, double volume) {
  const double x = rho * volume;
  if (!(x >= 1.0)) throw DomainError("stirling_s_prime needs rho*|Lambda| >= 1");
  return boost::math::digamma(x + 1.0) - std::log(x);
}

FreeEnergyModel::FreeEnergyModel(double beta, SimulationRegion region, ClusterTable table, StirlingPolicy policy)
    : beta_(beta), region_(region), table_(std::move(table)), policy_(policy) {
  if (!(beta_ > 0.0)) throw ArgumentError("beta must be > 0");
  if (std::abs(table_.beta - beta_) > 1e-12 * beta_)
    throw ArgumentError("cluster table beta does not match the model");
  if (table_.region.infinite != region_.infinite || table_.region.dim != region_.dim ||
      (!region_.infinite && std::abs(table_.region.side - region_.side) > 1e-12 * region_.side))
    throw ArgumentError("cluster table region " + table_.region.describe() + " does not match " +
                        region_.describe());
  if (static_cast<int>(table_.values.size()) != table_.n_max) throw ArgumentError("cluster table is inconsistent");
}

double FreeEnergyModel::star_ratio(double rho) const {
  return check_condition_star(rho, table_.c_beta, table_.c0).ratio;
}

namespace {

unsigned base_flags(const FreeEnergyModel& model, double rho) {
  unsigned flags = kFlagNone;
  if (model.star_ratio(rho) >= 1.0) flags |= kFlagStarViolated;
  const auto& t = model.table();
  if (t.tail_C > 0.0 && !t.tail_fitted) flags |= kFlagTailUnfitted;
  return flags;
}

// sum_{n > n_max} w(n) C e^{-c n}, stopping at n_last (inclusive) if finite.
double envelope_tail(const ClusterTable& t, long n_last, const std::function<double(int)>& w, unsigned& flags) {
  if (t.tail_C == 0.0) return 0.0;
  double sum = 0.0;
  double prev = INFINITY;
  const long stop = std::min<long>(n_last, t.n_max + 200000L);
  for (long n = t.n_max + 1; n <= stop; ++n) {
    const double term = w(static_cast<int>(n)) * t.tail_C * std::exp(-t.tail_c * n);
    if (!std::isfinite(term)) {
      flags |= kFlagTailDiverges;
      return INFINITY;
    }
    sum += term;
    if (n > t.n_max + 50 && term < 1e-18 * sum && term <= prev) return sum;
    prev = term;
  }
  if (stop < n_last) {
    flags |= kFlagTailDiverges;
    return INFINITY;
  }
  return sum;
}

}  // namespace

double f_coefficient(const FreeEnergyModel& model, long N, int n) {
  const double b = model.table().value(n);
  if (model.region().infinite) throw ArgumentError("f_coefficient needs a finite region");
  return p_poly(N, model.volume(), n) * b / (n + 1);
}

SeriesValue log_z_canonical(const FreeEnergyModel& model, long N) {
  if (N < 0) throw ArgumentError("N must be >= 0");
  if (model.region().infinite) throw ArgumentError("log_z_canonical needs a finite region");
  SeriesValue out;
  if (N == 0) return out;
  const double vol = model.volume();
  const auto& t = model.table();
  out.flags = base_flags(model, N / vol);
  double series = 0.0;
  const int top = static_cast<int>(std::min<long>(t.n_max, N - 1));
  for (int n = 1; n <= top; ++n) series += p_poly(N, vol, n) * t.values[n - 1] / (n + 1);
  out.value = N * std::log(vol) - ln_factorial(static_cast<double>(N), model.policy()) + N * series;
  if (N - 1 > t.n_max) {
    const double r = (N - 1) / vol;
    out.tail = N * envelope_tail(t, N - 1, [&](int n) { return std::pow(r, n); }, out.flags);
  }
  return out;
}

SeriesValue free_energy_f(const FreeEnergyModel& model, long N) {
  SeriesValue z = log_z_canonical(model, N);
  const double s = -1.0 / (model.beta() * model.volume());
  return {s * z.value, std::abs(s) * z.tail, z.flags};
}

SeriesValue cal_f(const FreeEnergyModel& model, double rho) { return cal_f_derivative(model, rho, 0); }

SeriesValue cal_f_derivative(const FreeEnergyModel& model, double rho, int m) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("density must lie in (0, 1)");
  if (m < 0) throw ArgumentError("derivative order must be >= 0");
  const double vol = model.volume();
  const auto& t = model.table();
  SeriesValue out;
  out.flags = base_flags(model, rho);
  double entropy;
  if (m == 0)
    entropy = rho * (std::log(rho) - 1.0);
  else if (m == 1)
    entropy = std::log(rho);
  else
    entropy = ((m % 2 == 0) ? 1.0 : -1.0) * std::tgamma(m - 1.0) / std::pow(rho, m - 1);
  double inter = 0.0;
  for (int n = 1; n <= t.n_max; ++n)
    inter += script_p_poly_derivative(rho, vol, n, m) * t.values[n - 1] / (n + 1);
  out.value = (entropy - inter) / model.beta();
  // |d^m P_{n+1}| <= (n+1)_m rho^{n+1-m} because every root lies in [0, rho].
  const long last = std::isinf(vol) ? std::numeric_limits<long>::max() : static_cast<long>(std::ceil(rho * vol)) - 1;
  const double tail = envelope_tail(
      t, last, [&](int n) { return m > n + 1 ? 0.0 : falling(n + 1.0, m) * std::pow(rho, n + 1 - m); }, out.flags);
  out.tail = tail / model.beta();
  return out;
}

Ensemble make_ensemble(const FreeEnergyModel& model) {
  if (model.region().infinite) throw ArgumentError("an ensemble needs a finite region");
  Ensemble e;
  e.beta = model.beta();
  e.volume = model.volume();
  e.stability_B = model.table().potential.stability_B;
  e.label = "cluster-expansion";
  e.log_z = [model](long N) { return log_z_canonical(model, N).value; };
  return e;
}

namespace {

long default_cap(const Ensemble& ens, double mu) {
  const double lam = std::exp(ens.beta * (mu + ens.stability_B)) * ens.volume;
  const double cap = std::max(10.0 * lam, 64.0);
  return cap > 1e9 ? 1000000000L : static_cast<long>(std::ceil(cap));
}

}  // namespace

long n_max_particles(const Ensemble& ens, double mu, long hard_cap) {
  if (!(ens.volume > 0.0)) throw ArgumentError("ensemble volume must be > 0");
  const long cap = hard_cap > 0 ? hard_cap : default_cap(ens, mu);
  const double slope = ens.beta * (mu + ens.stability_B) + std::log(ens.volume);
  double prev = 0.0;
  for (long N = 1; N <= cap; ++N) {
    const double g = N * slope - std::lgamma(N + 1.0);
    if (g < prev && g < kGrandFloor) return N;
    prev = g;
  }
  throw CapacityError("particle cutoff exceeds the hard cap " + std::to_string(cap) + " at mu = " +
                      std::to_string(mu));
}

GrandSum grand_sum(const Ensemble& ens, double mu, long hard_cap) {
  GrandSum gs;
  gs.n_max = n_max_particles(ens, mu, hard_cap);
  gs.log_w.resize(gs.n_max + 1);
  double peak = -INFINITY;
  for (long N = 0; N <= gs.n_max; ++N) {
    gs.log_w[N] = ens.beta * mu * N + ens.log_z(N);
    peak = std::max(peak, gs.log_w[N]);
  }
  double acc = 0.0;
  for (double w : gs.log_w) acc += std::exp(w - peak);
  gs.log_xi = peak + std::log(acc);
  // Geometric bound on the neglected terms of the stability bound.
  const double slope = ens.beta * (mu + ens.stability_B) + std::log(ens.volume);
  const long n1 = gs.n_max + 1;
  const double g1 = n1 * slope - std::lgamma(n1 + 1.0);
  const double r = std::exp(slope) / (n1 + 1.0);
  gs.truncation = r < 1.0 ? std::exp(g1 - gs.log_xi) / (1.0 - r) : INFINITY;
  return gs;
}

double pressure_grand(const Ensemble& ens, double mu) {
  return grand_sum(ens, mu).log_xi / (ens.beta * ens.volume);
}

}  // namespace clusterdev
