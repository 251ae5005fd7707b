// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include "clusterdev/deviations.hpp"

#include <algorithm>
#include <cmath>

#include "clusterdev/errors.hpp"
#include "clusterdev/format.hpp"
#include "clusterdev/oracle.hpp"

namespace clusterdev {

std::string to_string(Center c) { return c == Center::n_bar ? "N_bar" : "N_star"; }

std::string to_string(DVariant v) {
  switch (v) {
    case DVariant::plain: return "plain";
    case DVariant::plus: return "plus";
    case DVariant::minus: return "minus";
  }
  return "?";
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// S at an integer count, with S(0) = 0.
double stirling_count(long N, double volume) {
  if (N <= 0) return 0.0;
  return stirling_s(static_cast<double>(N) / volume, volume);
}

double fderiv(const FreeEnergyModel& model, double rho, int m) { return cal_f_derivative(model, rho, m).value; }

}  // namespace

DeviationSpec make_deviation(const FreeEnergyModel& model, const DualityPoint& dp, double alpha, double u) {
  if (!(alpha >= 0.5 && alpha <= 1.0)) throw DomainError("alpha must lie in [1/2, 1]");
  const double vol = model.volume();
  DeviationSpec s;
  s.alpha = alpha;
  s.u = u;
  s.center = alpha == 1.0 ? Center::n_bar : Center::n_star;
  s.center_N = alpha == 1.0 ? dp.N_bar : dp.N_star;
  const double scale = std::pow(vol, alpha);
  s.N_tilde = s.center_N + std::llround(u * scale);
  if (s.N_tilde < 0) throw DomainError("deviation gives a negative particle number");
  s.effective_u = static_cast<double>(s.N_tilde - s.center_N) / scale;
  const double ratio = model.star_ratio(static_cast<double>(s.N_tilde) / vol);
  if (ratio >= 1.0)
    throw RegimeError("deviation density leaves the convergence window (ratio " + std::to_string(ratio) + ")");
  return s;
}

int m_alpha(double alpha) {
  if (!(alpha >= 0.5 && alpha < 1.0)) throw DomainError("m(alpha) needs alpha in [1/2, 1)");
  for (int m = 1;; ++m)
    if (m * (1.0 - alpha) - 1.0 > 1e-12) return m;
}

double rate_i_gc(const Ensemble& ens, double rho_tilde, double rho_bar, double mu0) {
  const double ft = gc_free_energy(ens, rho_tilde, mu0);
  const double fb = gc_free_energy(ens, rho_bar, mu0);
  return ens.beta * (ft - fb - mu0 * (rho_tilde - rho_bar));
}

double variance_d(const FreeEnergyModel& model, double rho_star) {
  const double bracket = model.beta() * fderiv(model, rho_star, 2);
  if (!(bracket > 0.0)) throw RegimeError("F'' is not positive at rho* = " + std::to_string(rho_star));
  return 1.0 / bracket;
}

double variance_d_alpha(const FreeEnergyModel& model, double rho_star, double alpha, double u_eff, DVariant variant) {
  const int ma = m_alpha(alpha);
  const double vol = model.volume();
  double bracket = model.beta() * fderiv(model, rho_star, 2);
  if (ma > 3) {
    double sum = 0.0;
    for (int m = 3; m <= ma - 1; ++m) {
      const double fm = fderiv(model, rho_star, m);
      double g;
      switch (variant) {
        case DVariant::plain: g = std::pow(u_eff, m - 2) * fm; break;
        case DVariant::plus: g = std::pow(std::abs(u_eff), m - 2) * std::abs(fm); break;
        default: g = -std::pow(std::abs(u_eff), m - 2) * std::abs(fm); break;
      }
      sum += 2.0 * g / (factorial(m) * std::pow(vol, (m - 2) * (1.0 - alpha)));
    }
    bracket += model.beta() * sum;
  }
  if (!(bracket > 0.0))
    throw RegimeError("D^alpha bracket (" + to_string(variant) + ") is not positive at rho* = " +
                      std::to_string(rho_star));
  return 1.0 / bracket;
}

ErrorTerm error_e(const FreeEnergyModel& model, double alpha, double v, double rho_star, double mu0, int m_trunc) {
  const int ma = m_alpha(alpha);
  const double vol = model.volume();
  const double beta = model.beta();
  int mt = m_trunc > 0 ? m_trunc : ma + 6;
  mt = std::max({mt, ma, model.table().n_max + 1});
  const double q = 1.0 - alpha;
  ErrorTerm out;
  const SeriesValue f1 = cal_f_derivative(model, rho_star, 1);
  double bracket = v * (mu0 - f1.value) * std::pow(vol, ma * q + alpha - 1.0);
  double tail = std::abs(v) * f1.tail * std::pow(vol, ma * q + alpha - 1.0);
  for (int m = ma; m <= mt; ++m) {
    const SeriesValue fm = cal_f_derivative(model, rho_star, m);
    const double w = std::pow(v, m) / (factorial(m) * std::pow(vol, (m - ma) * q));
    bracket += w * fm.value;
    tail += std::abs(w) * fm.tail;
  }
  const double scale = beta * std::pow(vol, 1.0 - ma * q);
  out.value = scale * std::abs(bracket);
  // Entropy part beyond mt: |v|^m (m-2)!/(beta m! rho^{m-1} |Lambda|^{(m-ma)q}).
  const double y = std::abs(v) / (rho_star * std::pow(vol, q));
  if (v != 0.0) {
    if (y < 1.0) {
      out.tail = scale * tail + rho_star * vol * std::pow(y, mt + 1) / ((mt + 1.0) * mt * (1.0 - y));
    } else {
      out.tail = INFINITY;
    }
  } else {
    out.tail = 0.0;
  }
  out.precision_warning = !(out.tail <= out.value) && v != 0.0;
  return out;
}

double log_j(const Ensemble& ens, double mu, long N, long N_ref) {
  return ens.beta * mu * static_cast<double>(N - N_ref) + ens.log_z(N) - ens.log_z(N_ref);
}

JExpansion j_expansion(const FreeEnergyModel& model, const Ensemble& ens, double mu0, long N, long N_star,
                       double alpha) {
  if (N_star < 1) throw RegimeError("J expansion needs N* >= 1");
  const double vol = model.volume();
  const double rho_star = static_cast<double>(N_star) / vol;
  JExpansion j;
  j.v = static_cast<double>(N - N_star) / std::pow(vol, alpha);
  j.log_j = log_j(ens, mu0, N, N_star);
  const double d_alpha = variance_d_alpha(model, rho_star, alpha, j.v, DVariant::plain);
  j.gaussian = -j.v * j.v * std::pow(vol, 2.0 * alpha - 1.0) / (2.0 * d_alpha);
  j.stirling_exact = -vol * (stirling_count(N, vol) - stirling_count(N_star, vol));
  j.stirling_paper = vol * stirling_count(N_star, vol);
  j.remainder = j.log_j - j.gaussian - j.stirling_exact;
  j.e = error_e(model, alpha, j.v, rho_star, mu0);
  const double slack = 1e-9 * std::max(1.0, std::abs(j.log_j));
  j.sandwich = std::abs(j.remainder) <= j.e.total() + slack;
  j.paper_sandwich = std::abs(j.log_j - j.gaussian - j.stirling_paper) <= j.e.total() + slack;
  return j;
}

double log_k(const Ensemble& ens, double mu, long N_ref) {
  const GrandSum gs = grand_sum(ens, mu);
  return -(gs.log_xi - (ens.beta * mu * static_cast<double>(N_ref) + ens.log_z(N_ref)));
}

KCheck k_check(const FreeEnergyModel& model, const Ensemble& ens, double mu0, long N_star, double alpha, double v_k) {
  if (N_star < 1) throw RegimeError("K check needs N* >= 1");
  const double vol = model.volume();
  const double rho_star = static_cast<double>(N_star) / vol;
  KCheck k;
  k.v = v_k > 0.0 ? v_k : 3.0 * std::sqrt(variance_d(model, rho_star)) * std::pow(vol, 0.5 - alpha);
  k.log_k = log_k(ens, mu0, N_star);
  const long n_max = n_max_particles(ens, mu0);
  double peak = -INFINITY;
  std::vector<double> lj(n_max + 1);
  for (long N = 0; N <= n_max; ++N) {
    lj[N] = log_j(ens, mu0, N, N_star);
    peak = std::max(peak, lj[N]);
  }
  double acc = 0.0;
  for (double x : lj) acc += std::exp(x - peak);
  k.log_sum_j = peak + std::log(acc);
  k.identity_residual = std::abs(std::expm1(k.log_k + k.log_sum_j));
  const double d_plus = variance_d_alpha(model, rho_star, alpha, k.v, DVariant::plus);
  k.scaled = std::exp(k.log_k) * std::sqrt(2.0 * M_PI * d_plus * vol);
  k.e = error_e(model, alpha, k.v, rho_star, mu0);
  const double e = k.e.total();
  k.lo = 1.0 / (1.0 + e);
  k.hi = e < 1.0 ? 1.0 / (1.0 - e) : INFINITY;
  k.inside = k.lo <= k.scaled && k.scaled <= k.hi;
  return k;
}

namespace {

void attach_oracle(DeviationReport& r, const Ensemble* oracle) {
  if (oracle == nullptr) return;
  const ProbabilityInterval p = exact_prob(*oracle, r.mu0, r.spec.N_tilde);
  r.has_oracle = true;
  r.oracle = p.value();
  r.oracle_residual = std::abs(r.oracle - r.estimate);
  if (!std::isnan(r.budget)) r.within_budget = r.oracle_residual <= r.budget;
}

double relative_series_tail(const FreeEnergyModel& model, long a, long b) {
  return log_z_canonical(model, a).tail + log_z_canonical(model, b).tail;
}

void star_warnings(const FreeEnergyModel& model, DeviationReport& r, double rho) {
  if (model.star_ratio(rho) >= 1.0) r.warnings.push_back("convergence condition violated at rho = " + fmt_num(rho));
}

DeviationReport moderate_impl(const FreeEnergyModel& model, double mu0, double u, double alpha, const Ensemble* oracle,
                              const char* kind) {
  const Ensemble ens = make_ensemble(model);
  const DualityPoint dp = duality_point(ens, mu0, &model);
  DeviationReport r;
  r.kind = kind;
  r.mu0 = mu0;
  r.volume = model.volume();
  r.spec = make_deviation(model, dp, alpha, u);
  if (dp.N_star < 1) throw RegimeError("N* = 0: no particles at the center");
  const double vol = r.volume;
  const double rho_star = static_cast<double>(dp.N_star) / vol;
  const double ua = r.spec.effective_u;
  r.m_alpha = m_alpha(alpha);
  r.D = variance_d_alpha(model, rho_star, alpha, ua, DVariant::plain);
  r.D_plus = variance_d_alpha(model, rho_star, alpha, ua, DVariant::plus);
  try {
    r.D_minus = variance_d_alpha(model, rho_star, alpha, ua, DVariant::minus);
  } catch (const RegimeError&) {
    r.warnings.push_back("D^{alpha,-} bracket not positive");
  }
  const double expo = -ua * ua * std::pow(vol, 2.0 * alpha - 1.0) / (2.0 * r.D);
  const double pref = std::sqrt(2.0 * M_PI * r.D_plus * vol);
  r.rate = -expo / vol;
  r.estimate = std::exp(expo) / pref;
  const ErrorTerm e = error_e(model, alpha, ua, rho_star, mu0);
  if (e.precision_warning) r.warnings.push_back("error-term tail exceeds its leading part");
  r.E = e.total();
  r.theorem_bound = 2.0 * std::exp(expo) * r.E / pref;
  const JExpansion jx = j_expansion(model, ens, mu0, r.spec.N_tilde, dp.N_star, alpha);
  r.E_J = std::abs(jx.stirling_exact) + jx.e.total();
  const KCheck kc = k_check(model, ens, mu0, dp.N_star, alpha);
  const double ek = kc.e.total();
  r.E_K = ek < 1.0 ? -std::log1p(-ek) : INFINITY;
  r.series_tail = relative_series_tail(model, r.spec.N_tilde, dp.N_star);
  const double e_comb = r.E_J + r.E_K + r.series_tail;
  r.budget = 2.0 * e_comb * r.estimate;
  r.band_lo = r.estimate - r.budget;
  r.band_hi = r.estimate + r.budget;
  star_warnings(model, r, rho_star);
  star_warnings(model, r, static_cast<double>(r.spec.N_tilde) / vol);
  attach_oracle(r, oracle);
  return r;
}

}  // namespace

DeviationReport precise_ld(const FreeEnergyModel& model, double mu0, double u, const Ensemble* oracle,
                           double theorem_constant) {
  const Ensemble ens = make_ensemble(model);
  const DualityPoint dp = duality_point(ens, mu0, &model);
  DeviationReport r;
  r.kind = "precise-ld";
  r.mu0 = mu0;
  r.volume = model.volume();
  r.spec = make_deviation(model, dp, 1.0, u);
  const double vol = r.volume;
  const double rho_tilde = static_cast<double>(r.spec.N_tilde) / vol;
  r.mu_tilde = find_mu_tilde(ens, rho_tilde, mu0);
  const NStar ns = find_n_star(ens, r.mu_tilde);
  if (ns.boundary) r.warnings.push_back("N~* on the scan boundary");
  if (ns.N < 1) throw RegimeError("N~* = 0: no particles at the tilted center");
  r.N_tilde_star = ns.N;
  r.n_gap = std::labs(r.spec.N_tilde - ns.N);
  if (r.n_gap > 2) r.warnings.push_back("|N~ - N~*| = " + std::to_string(r.n_gap));
  r.rate = rate_i_gc(ens, rho_tilde, dp.rho_bar, mu0);
  r.D = variance_d(model, static_cast<double>(ns.N) / vol);
  r.estimate = std::exp(-vol * r.rate) / std::sqrt(2.0 * M_PI * r.D * vol);
  r.series_tail = relative_series_tail(model, r.spec.N_tilde, dp.N_bar);
  r.theorem_constant = theorem_constant;
  if (!std::isnan(theorem_constant)) {
    r.budget = theorem_constant * r.estimate / vol + r.series_tail * r.estimate;
    r.theorem_bound = r.budget;
    r.band_lo = r.estimate - r.budget;
    r.band_hi = r.estimate + r.budget;
  }
  star_warnings(model, r, dp.rho_bar);
  star_warnings(model, r, rho_tilde);
  attach_oracle(r, oracle);
  return r;
}

DeviationReport moderate_dev(const FreeEnergyModel& model, double mu0, double u, double alpha, const Ensemble* oracle) {
  return moderate_impl(model, mu0, u, alpha, oracle, "moderate");
}

DeviationReport lclt(const FreeEnergyModel& model, double mu0, double u, const Ensemble* oracle) {
  return moderate_impl(model, mu0, u, 0.5, oracle, "lclt");
}

Option2 option2(const Ensemble& ens, double mu0, long N_tilde, long N_star) {
  Option2 o;
  o.log_j = log_j(ens, mu0, N_tilde, N_star);
  o.log_k = log_k(ens, mu0, N_star);
  o.probability = std::exp(o.log_j + o.log_k);
  return o;
}

double rate_i_infinite(const InfiniteVolumeModel& model, double rho_tilde, double rho0) {
  const double b = model.beta();
  return b * (model.f(rho_tilde) - model.f(rho0) - model.f_derivative(rho0, 1) * (rho_tilde - rho0));
}

RegionMasses lemma_region_masses(const Ensemble& ens, double mu0, long N_star, double alpha, double v, double delta,
                                 double v_prime, int dim) {
  const double thr = (2.0 * dim - 1.0) / (2.0 * dim);
  RegionMasses m;
  m.split = alpha <= thr;
  if (m.split && !(delta > thr)) throw ArgumentError("delta must exceed (2d-1)/2d");
  const ProbabilityVector pv = exact_probabilities(ens, mu0);
  const double r_in = v * std::pow(ens.volume, alpha);
  const double r_mid = m.split ? v_prime * std::pow(ens.volume, delta) : r_in;
  for (std::size_t N = 0; N < pv.p.size(); ++N) {
    const double d = std::abs(static_cast<double>(N) - static_cast<double>(N_star));
    if (d <= r_in)
      m.inner += pv.p[N];
    else if (d <= r_mid)
      m.intermediate += pv.p[N];
    else
      m.outer += pv.p[N];
  }
  m.outer += pv.truncation;
  return m;
}

double calibrate_theorem_constant(const std::vector<CalibrationPoint>& points, double safety) {
  if (points.empty()) throw ArgumentError("calibration needs at least one point");
  double c = 0.0;
  for (const auto& p : points) {
    if (!(p.estimate > 0.0)) throw ArgumentError("calibration estimate must be > 0");
    c = std::max(c, std::abs(p.oracle - p.estimate) * p.volume / p.estimate);
  }
  return c * safety;
}

namespace {
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(fmt_num(x)); }
}  // namespace

nlohmann::json to_json(const DeviationReport& r) {
  nlohmann::json j;
  j["schema"] = "clusterdev.deviation_report";
  j["schema_version"] = kDeviationReportSchema;
  j["kind"] = r.kind;
  j["spec"] = {{"alpha", r.spec.alpha},        {"u", r.spec.u},
               {"center", to_string(r.spec.center)}, {"center_N", r.spec.center_N},
               {"N_tilde", r.spec.N_tilde},    {"effective_u", r.spec.effective_u}};
  j["volume"] = r.volume;
  j["mu0"] = r.mu0;
  j["rate"] = num(r.rate);
  j["D"] = num(r.D);
  j["D_plus"] = num(r.D_plus);
  j["D_minus"] = num(r.D_minus);
  j["m_alpha"] = r.m_alpha;
  j["E"] = num(r.E);
  j["E_J"] = num(r.E_J);
  j["E_K"] = num(r.E_K);
  j["estimate"] = num(r.estimate);
  j["theorem_bound"] = num(r.theorem_bound);
  j["budget"] = num(r.budget);
  j["band"] = {num(r.band_lo), num(r.band_hi)};
  j["oracle"] = r.has_oracle ? num(r.oracle) : nlohmann::json(nullptr);
  j["oracle_residual"] = r.has_oracle ? num(r.oracle_residual) : nlohmann::json(nullptr);
  j["within_budget"] = r.has_oracle ? nlohmann::json(r.within_budget) : nlohmann::json(nullptr);
  j["theorem_constant"] = num(r.theorem_constant);
  j["mu_tilde"] = num(r.mu_tilde);
  j["N_tilde_star"] = r.N_tilde_star;
  j["n_gap"] = r.n_gap;
  j["series_tail"] = num(r.series_tail);
  j["warnings"] = r.warnings;
  return j;
}

std::vector<std::string> deviation_csv_header() {
  return {"volume", "kind", "alpha", "u", "u_eff", "N_tilde", "center_N", "estimate", "oracle", "rate",
          "D_variant", "E", "residual", "budget", "within_budget", "warnings"};
}

std::vector<std::string> deviation_csv_row(const DeviationReport& r) {
  std::string warn;
  for (const auto& w : r.warnings) warn += (warn.empty() ? "" : ";") + w;
  return {fmt_num(r.volume),
          r.kind,
          fmt_num(r.spec.alpha),
          fmt_num(r.spec.u),
          fmt_num(r.spec.effective_u),
          fmt_num(r.spec.N_tilde),
          fmt_num(r.spec.center_N),
          fmt_num(r.estimate),
          r.has_oracle ? fmt_num(r.oracle) : "",
          fmt_num(r.rate),
          fmt_num(r.spec.alpha == 1.0 ? r.D : r.D_plus),
          fmt_num(r.E),
          r.has_oracle ? fmt_num(r.oracle_residual) : "",
          fmt_num(r.budget),
          r.has_oracle ? (r.within_budget ? "1" : "0") : "",
          warn};
}

}  // namespace clusterdev
