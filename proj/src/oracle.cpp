#include "clusterdev/oracle.hpp"

#include <cmath>
#include <complex>

#include "clusterdev/errors.hpp"
#include "clusterdev/kernels/graph_quadrature.hpp"

namespace clusterdev {

std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::closed_form: return "closed-form";
    case OracleMethod::quadrature: return "quadrature";
    case OracleMethod::monte_carlo: return "monte-carlo";
    case OracleMethod::char_fn_inversion: return "char-fn-inversion";
  }
  return "?";
}

OracleResult tonks_log_z(long N, double L, double a) {
  if (N < 0 || !(L > 0.0) || a < 0.0) throw ArgumentError("tonks_log_z needs N >= 0, L > 0, a >= 0");
  OracleResult r;
  if (N == 0) return r;
  const double free_len = L - (N - 1) * a;
  if (!(free_len > 0.0)) {
    r.value = -INFINITY;
    return r;
  }
  r.value = N * std::log(free_len) - std::lgamma(N + 1.0);
  return r;
}

double tonks_pressure(double rho, double a) {
  if (!(rho >= 0.0 && rho * a < 1.0)) throw DomainError("tonks_pressure needs 0 <= rho a < 1");
  return rho / (1.0 - rho * a);
}

double tonks_beta_mu(double rho, double a) {
  if (!(rho > 0.0 && rho * a < 1.0)) throw DomainError("tonks_beta_mu needs 0 < rho a < 1");
  const double x = rho * a;
  return std::log(rho) - std::log1p(-x) + x / (1.0 - x);
}

OracleResult quadrature_log_z(const PairPotential& pot, double beta, const SimulationRegion& region, long N,
                              const IntegrationConfig& cfg, long n_quad_max) {
  if (region.infinite) throw ArgumentError("quadrature_log_z needs a finite region");
  if (N < 0) throw ArgumentError("N must be >= 0");
  const long cap = n_quad_max > 0 ? n_quad_max : (region.dim == 1 ? 6 : 4);
  if (N > cap) throw CapacityError("quadrature oracle supports N <= " + std::to_string(cap));
  OracleResult r;
  r.method = OracleMethod::quadrature;
  const double vol = region.volume();
  if (N == 0) return r;
  if (N == 1 || pot.is_zero()) {
    r.value = N * std::log(vol) - std::lgamma(N + 1.0);
    return r;
  }
  kernels::GraphIntegral p;
  p.potential = &pot;
  p.beta = beta;
  p.vertices = static_cast<int>(N);
  p.domain = kernels::Domain::box;
  p.side = region.side;
  p.leaf = kernels::Leaf::boltzmann;
  double integral;
  double err = 0.0;
  if (region.dim == 1 && cfg.scheme == Scheme::tensor_quadrature) {
    p.smooth_points = cfg.points > 0 ? cfg.points : 64;
    integral = cfg.parallel ? kernels::integrate_graph_omp(p, cfg.threads) : kernels::integrate_graph_serial(p);
    if (!pot.piecewise_constant()) {
      kernels::GraphIntegral q = p;
      q.smooth_points = p.smooth_points + 8;
      const double ref = cfg.parallel ? kernels::integrate_graph_omp(q, cfg.threads) : kernels::integrate_graph_serial(q);
      err = std::abs(ref - integral);
      integral = ref;
    }
  } else {
    kernels::McIntegral mc;
    mc.base = p;
    mc.dim = region.dim;
    mc.samples = cfg.samples;
    mc.seed = cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(N));
    const auto res = cfg.parallel ? kernels::integrate_graph_mc_omp(mc, cfg.threads) : kernels::integrate_graph_mc_serial(mc);
    integral = res.value;
    err = 3.0 * res.std_error;
    r.method = OracleMethod::monte_carlo;
    r.seed = mc.seed;
  }
  if (!(integral > 0.0)) throw IntegrationError("configuration integral is not positive");
  r.value = std::log(integral) - std::lgamma(N + 1.0);
  r.error = err / integral;
  if (r.error > std::max(cfg.rel_tol, 1e-12) && r.method == OracleMethod::quadrature)
    throw IntegrationError("quadrature oracle error " + std::to_string(r.error) + " above tolerance");
  return r;
}

double poisson_log_pmf(long N, double lambda) {
  if (N < 0) return -INFINITY;
  if (lambda == 0.0) return N == 0 ? 0.0 : -INFINITY;
  return N * std::log(lambda) - lambda - std::lgamma(N + 1.0);
}

Ensemble ideal_ensemble(double volume, double beta) {
  if (!(volume > 0.0)) throw ArgumentError("volume must be > 0");
  Ensemble e;
  e.beta = beta;
  e.volume = volume;
  e.label = "ideal-gas";
  e.log_z = [volume](long N) { return N * std::log(volume) - std::lgamma(N + 1.0); };
  return e;
}

Ensemble tonks_ensemble(double L, double a, double beta) {
  Ensemble e;
  e.beta = beta;
  e.volume = L;
  e.label = "tonks";
  e.log_z = [L, a](long N) { return tonks_log_z(N, L, a).value; };
  return e;
}

ProbabilityVector exact_probabilities(const Ensemble& ens, double mu0) {
  const GrandSum gs = grand_sum(ens, mu0);
  ProbabilityVector pv;
  pv.n_max = gs.n_max;
  pv.truncation = gs.truncation;
  pv.log_xi = gs.log_xi;
  pv.p.resize(gs.log_w.size());
  for (std::size_t N = 0; N < gs.log_w.size(); ++N) pv.p[N] = std::exp(gs.log_w[N] - gs.log_xi);
  return pv;
}

ProbabilityInterval exact_prob(const Ensemble& ens, double mu0, long N) {
  if (N < 0) return {};
  const GrandSum gs = grand_sum(ens, mu0);
  if (N > gs.n_max) return {0.0, gs.truncation};
  const double p = std::exp(gs.log_w[N] - gs.log_xi);
  return {p, p};
}

double char_fn_invert(const std::vector<double>& probabilities, long N_target) {
  const long M = static_cast<long>(probabilities.size());
  if (M == 0) throw ArgumentError("empty probability vector");
  if (N_target < 0 || N_target >= M) return 0.0;
  // phi(t_k) on t_k = 2 pi k / M, then the inverse sum.
  std::complex<double> acc = 0.0;
  // Phases are reduced mod M before scaling.
  auto phase = [M](long k, long N) { return 2.0 * M_PI * static_cast<double>((k * N) % M) / M; };
  for (long k = 0; k < M; ++k) {
    std::complex<double> phi = 0.0;
    for (long N = 0; N < M; ++N) phi += probabilities[N] * std::polar(1.0, phase(k, N));
    acc += std::polar(1.0, -phase(k, N_target)) * phi;
  }
  return acc.real() / M;
}

}  // namespace clusterdev
