#include "pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "clusterdev/acceptance.hpp"
#include "clusterdev/deviations.hpp"
#include "clusterdev/duality.hpp"
#include "clusterdev/errors.hpp"
#include "clusterdev/format.hpp"
#include "clusterdev/graph_enum.hpp"
#include "clusterdev/oracle.hpp"

namespace clusterdev::cli {
namespace {

constexpr int kReportSchema = 1;
namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << csv_field(fields[i]);
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

nlohmann::json envelope(const std::string& kind, const Context& ctx) {
  nlohmann::json j;
  j["schema"] = "clusterdev." + kind;
  j["schema_version"] = kReportSchema;
  j["potential"] = potential_to_json(ctx.cfg.potential);
  j["beta"] = ctx.cfg.beta;
  j["dimension"] = ctx.cfg.dimension;
  j["mu0"] = ctx.mu0;
  j["seed"] = ctx.cfg.seed;
  return j;
}

std::string volume_tag(double v) { return fmt_num(v); }

double closed_form_mu(const RunConfig& cfg, double rho) {
  if (cfg.potential.is_zero()) return std::log(rho) / cfg.beta;
  if (cfg.potential.pure_hard_core() && cfg.dimension == 1) {
    if (!(rho * cfg.potential.hard_core_radius < 1.0)) throw ConfigError("density exceeds close packing");
    return tonks_beta_mu(rho, cfg.potential.hard_core_radius) / cfg.beta;
  }
  return NAN;
}

std::vector<double> oracle_log_z(const RunConfig& cfg, const SimulationRegion& reg, long n_fit) {
  std::vector<double> lz;
  for (long N = 1; N <= n_fit; ++N) {
    switch (cfg.oracle) {
      case OracleKind::poisson:
        lz.push_back(N * std::log(reg.volume()) - std::lgamma(N + 1.0));
        break;
      case OracleKind::tonks:
        lz.push_back(tonks_log_z(N, reg.side, cfg.potential.hard_core_radius).value);
        break;
      case OracleKind::quadrature:
        lz.push_back(quadrature_log_z(cfg.potential, cfg.beta, reg, N, cfg.integration).value);
        break;
      default:
        throw ConfigError("coefficients.source = oracle-fit needs an oracle");
    }
  }
  return lz;
}

ClusterTable build_table(const Context& ctx, const SimulationRegion& reg) {
  const RunConfig& cfg = ctx.cfg;
  switch (cfg.source) {
    case TableSource::compute:
      return compute_table(cfg.potential, cfg.beta, reg, cfg.n_max, cfg.mode, cfg.integration);
    case TableSource::load: {
      const std::string path = ctx.table_override.empty() ? cfg.table_path : ctx.table_override;
      if (path.empty()) throw ConfigError("coefficients.source = load needs a table path (--table or coefficients.table)");
      ClusterTable t = load_table(path);
      if (t.region.infinite || t.region.dim != reg.dim || std::abs(t.region.side - reg.side) > 1e-12 * reg.side)
        throw ConfigError("loaded table region " + t.region.describe() + " does not match " + reg.describe());
      if (std::abs(t.beta - cfg.beta) > 0.0) throw ConfigError("loaded table beta does not match the config");
      return t;
    }
    case TableSource::oracle_fit: {
      const long cap = reg.dim == 1 ? 6 : 4;
      const long n_fit = cfg.oracle == OracleKind::quadrature ? std::min<long>(cfg.n_max + 3, cap) : cfg.n_max + 4;
      return fit_coefficients_from_oracle(oracle_log_z(cfg, reg, n_fit), cfg.beta, reg, cfg.n_max);
    }
  }
  throw ConfigError("unknown table source");
}

std::optional<Ensemble> grand_oracle(const RunConfig& cfg, double V, const SimulationRegion& reg) {
  if (cfg.oracle == OracleKind::poisson) return ideal_ensemble(V, cfg.beta);
  if (cfg.oracle == OracleKind::tonks) return tonks_ensemble(reg.side, cfg.potential.hard_core_radius, cfg.beta);
  return std::nullopt;
}

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

}  // namespace

Context make_context(const RunConfig& cfg, const std::string& out_dir, const std::string& table_override,
                     bool need_infinite) {
  Context ctx;
  ctx.cfg = cfg;
  ctx.out_dir = out_dir;
  ctx.table_override = table_override;
  fs::create_directories(out_dir);

  const bool closed = !std::isnan(closed_form_mu(cfg, 0.01));
  if (need_infinite || (cfg.density && !closed)) {
    ctx.infinite = compute_table(cfg.potential, cfg.beta, SimulationRegion::infinite_volume(cfg.dimension),
                                 cfg.n_max_infinite, TableMode::infinite_volume, cfg.integration);
  }
  if (cfg.density) {
    ctx.rho_ref = *cfg.density;
    ctx.mu0 = closed ? closed_form_mu(cfg, ctx.rho_ref) : InfiniteVolumeModel(cfg.beta, *ctx.infinite).mu_of_rho(ctx.rho_ref);
  } else {
    ctx.mu0 = *cfg.mu0;
  }

  for (double V : cfg.volumes) {
    VolumeEntry e;
    e.volume = V;
    e.region = SimulationRegion::box(cfg.dimension, std::pow(V, 1.0 / cfg.dimension));
    if (cfg.dimension == 1) e.region.side = V;
    e.model = std::make_shared<FreeEnergyModel>(cfg.beta, e.region, build_table(ctx, e.region));
    e.oracle = grand_oracle(cfg, V, e.region);
    ctx.volumes.push_back(std::move(e));
  }
  if (!cfg.density) {
    // Reference density from the first volume's grand-canonical mean.
    const auto& v0 = ctx.volumes.front();
    const Ensemble ens = v0.oracle ? *v0.oracle : make_ensemble(*v0.model);
    ctx.rho_ref = mean_density(ens, ctx.mu0, false).rho_bar;
  }
  return ctx;
}

void require_convergent(const Context& ctx) {
  for (const auto& v : ctx.volumes) {
    const double ratio = v.model->star_ratio(ctx.rho_ref);
    if (!(ratio < 1.0))
      throw RegimeError("condition (star) fails at rho=" + fmt_num(ctx.rho_ref) + " for volume " + fmt_num(v.volume) +
                        " (ratio " + fmt_num(ratio) + "); run validate for details");
  }
}

int cmd_coeffs(Context& ctx) {
  const fs::path out(ctx.out_dir);
  nlohmann::json j = envelope("coeffs", ctx);
  j["tables"] = nlohmann::json::array();
  for (const auto& v : ctx.volumes) {
    const std::string name = "table_V" + volume_tag(v.volume) + ".json";
    write_atomic(out / name, to_json(v.model->table()).dump(2) + "\n");
    j["tables"].push_back({{"volume", v.volume}, {"file", name}, {"values", v.model->table().values}});
    std::printf("volume %s:", volume_tag(v.volume).c_str());
    for (int n = 1; n <= v.model->table().n_max; ++n) std::printf(" B(%d)=%s", n, fmt_num(v.model->table().value(n)).c_str());
    std::printf("\n");
  }
  if (ctx.infinite) {
    write_atomic(out / "table_infinite.json", to_json(*ctx.infinite).dump(2) + "\n");
    j["infinite"] = {{"file", "table_infinite.json"}, {"values", ctx.infinite->values}};
    std::printf("infinite volume:");
    for (int n = 1; n <= ctx.infinite->n_max; ++n) std::printf(" beta_%d=%s", n, fmt_num(ctx.infinite->value(n)).c_str());
    std::printf("\n");
    try {
      const DecayFit d = decay_fit(*ctx.infinite, ctx.rho_ref);
      std::printf("decay fit at rho=%s: C=%s c=%s star_ratio=%s violation=%s%s\n", fmt_num(ctx.rho_ref).c_str(),
                  fmt_num(d.C).c_str(), fmt_num(d.c).c_str(), fmt_num(d.star_ratio).c_str(),
                  d.violation ? "yes" : "no", d.reason.empty() ? "" : (" (" + d.reason + ")").c_str());
      j["decay_fit"] = {{"rho", ctx.rho_ref}, {"C", d.C}, {"c", d.c}, {"star_ratio", d.star_ratio},
                        {"violation", d.violation}, {"reason", d.reason}};
    } catch (const FitError& e) {
      std::printf("%s\n", e.what());
      j["decay_fit"] = {{"error", e.what()}};
    }
  }
  GraphCountCache cache;
  const int top = std::min(std::max(ctx.cfg.n_max, ctx.cfg.n_max_infinite) + 1, kGraphMaxDefault);
  for (int n = 2; n <= top; ++n) {
    cache.get(n, GraphPredicate::connected);
    cache.get(n, GraphPredicate::biconnected);
  }
  cache.save((out / "graph_counts.txt").string());
  write_atomic(out / "coeffs.json", j.dump(2) + "\n");
  return 0;
}

int cmd_thermo(Context& ctx) {
  require_convergent(ctx);
  const fs::path out(ctx.out_dir);
  Csv rows({"volume", "N", "rho", "log_z", "log_z_tail", "oracle_log_z", "oracle_error", "oracle_method", "beta_f",
            "beta_cal_f", "stirling_s", "flags"});
  Csv press({"volume", "mu0", "pressure_model", "pressure_oracle", "rho_bar_model", "rho_bar_oracle", "star_ratio"});
  const RunConfig& cfg = ctx.cfg;
  for (const auto& v : ctx.volumes) {
    const FreeEnergyModel& m = *v.model;
    const Ensemble ens = make_ensemble(m);
    const long top = std::min<long>(n_max_particles(v.oracle ? *v.oracle : ens, ctx.mu0), 2000);
    for (long N = 0; N <= top; ++N) {
      const SeriesValue lz = log_z_canonical(m, N);
      std::string o_val, o_err, o_meth;
      if (v.oracle) {
        o_val = fmt_num(v.oracle->log_z(N));
        o_err = "0";
        o_meth = "closed-form";
      } else if (cfg.oracle == OracleKind::quadrature && N <= (cfg.dimension == 1 ? 6 : 4)) {
        const auto q = quadrature_log_z(cfg.potential, cfg.beta, v.region, N, cfg.integration);
        o_val = fmt_num(q.value);
        o_err = fmt_num(q.error);
        o_meth = to_string(q.method);
      }
      const double rho = N / v.volume;
      const bool inside = N >= 1 && rho < 1.0;
      rows.row({fmt_num(v.volume), fmt_num(N), fmt_num(rho), fmt_num(lz.value), fmt_num(lz.tail), o_val, o_err, o_meth,
                fmt_num(cfg.beta * free_energy_f(m, N).value), inside ? fmt_num(cfg.beta * cal_f(m, rho).value) : "",
                inside ? fmt_num(stirling_s(rho, v.volume)) : "", flags_to_string(lz.flags)});
    }
    const double pm = pressure_grand(ens, ctx.mu0);
    const double rm = mean_density(ens, ctx.mu0, false).rho_bar;
    press.row({fmt_num(v.volume), fmt_num(ctx.mu0), fmt_num(pm), v.oracle ? fmt_num(pressure_grand(*v.oracle, ctx.mu0)) : "",
               fmt_num(rm), v.oracle ? fmt_num(mean_density(*v.oracle, ctx.mu0, false).rho_bar) : "",
               fmt_num(m.star_ratio(rm))});
  }
  write_atomic(out / "thermo.csv", rows.str());
  write_atomic(out / "pressure.csv", press.str());
  std::printf("%s", press.str().c_str());
  return 0;
}

int cmd_duality(Context& ctx) {
  require_convergent(ctx);
  const fs::path out(ctx.out_dir);
  Csv rows({"volume", "source", "mu0", "rho_bar", "N_bar", "sigma2", "N_star", "rho_star", "mu_consistency_residual",
            "density_derivative_residual", "variance_fd_residual", "n_star_boundary", "n_max", "truncation"});
  Csv probs({"volume", "N", "log_z", "probability"});
  nlohmann::json j = envelope("duality", ctx);
  j["points"] = nlohmann::json::array();
  auto emit = [&](double V, const char* src, const DualityPoint& p) {
    rows.row({fmt_num(V), src, fmt_num(p.mu0), fmt_num(p.rho_bar), fmt_num(p.N_bar), fmt_num(p.sigma2),
              fmt_num(p.N_star), fmt_num(p.rho_star), fmt_num(p.mu_consistency_residual),
              fmt_num(p.density_derivative_residual), fmt_num(p.variance_fd_residual), p.n_star_boundary ? "1" : "0",
              fmt_num(p.n_max), fmt_num(p.truncation)});
    auto pj = to_json(p);
    pj["volume"] = V;
    pj["source"] = src;
    j["points"].push_back(pj);
  };
  for (const auto& v : ctx.volumes) {
    const Ensemble ens = make_ensemble(*v.model);
    emit(v.volume, "model", duality_point(ens, ctx.mu0, v.model.get()));
    if (v.oracle) {
      emit(v.volume, "oracle", duality_point(*v.oracle, ctx.mu0));
      const ProbabilityVector pv = exact_probabilities(*v.oracle, ctx.mu0);
      for (long N = 0; N <= pv.n_max; ++N)
        probs.row({fmt_num(v.volume), fmt_num(N), fmt_num(v.oracle->log_z(N)), fmt_num(pv.p[N])});
    }
  }
  if (ctx.infinite) {
    try {
      const InfiniteVolumeModel ivm(ctx.cfg.beta, *ctx.infinite);
      const double rho0 = ivm.rho0(ctx.mu0);
      j["infinite"] = {{"rho0", rho0}, {"sigma2", ivm.sigma2(rho0)}, {"pressure", ivm.pressure(ctx.mu0)}};
    } catch (const Error& e) {
      j["infinite"] = {{"error", e.what()}};
    }
  }
  write_atomic(out / "duality.csv", rows.str());
  write_atomic(out / "oracle_probabilities.csv", probs.str());
  write_atomic(out / "duality.json", j.dump(2) + "\n");
  std::printf("%s", rows.str().c_str());
  return 0;
}

int cmd_deviations(Context& ctx) {
  require_convergent(ctx);
  const fs::path out(ctx.out_dir);
  const RunConfig& cfg = ctx.cfg;
  struct Row {
    std::size_t vol;
    double alpha;
    double u;
  };
  std::vector<Row> grid;
  for (std::size_t i = 0; i < ctx.volumes.size(); ++i)
    for (double a : cfg.alphas)
      for (double u : cfg.us) grid.push_back({i, a, u});

  // Theorem constant per u for alpha = 1 rows: fixed, or calibrated on the two largest volumes.
  std::map<double, double> constant;
  std::vector<std::size_t> order(ctx.volumes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ctx.volumes[a].volume < ctx.volumes[b].volume; });
  for (double u : cfg.us) {
    if (cfg.theorem_constant) {
      constant[u] = *cfg.theorem_constant;
      continue;
    }
    constant[u] = NAN;
    if (order.size() < 2 || !ctx.volumes.front().oracle) continue;
    std::vector<CalibrationPoint> pts;
    try {
      for (std::size_t k = order.size() - 2; k < order.size(); ++k) {
        const auto& v = ctx.volumes[order[k]];
        const auto r = precise_ld(*v.model, ctx.mu0, u, &*v.oracle);
        pts.push_back({v.volume, r.estimate, r.oracle});
      }
      constant[u] = calibrate_theorem_constant(pts);
    } catch (const Error&) {
    }
  }

  std::vector<DeviationReport> reports(grid.size());
  std::vector<std::string> failures(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(grid.size()); ++k) {
    const Row& g = grid[k];
    const auto& v = ctx.volumes[g.vol];
    const Ensemble* orc = v.oracle ? &*v.oracle : nullptr;
    try {
      if (g.alpha == 1.0) reports[k] = precise_ld(*v.model, ctx.mu0, g.u, orc, constant[g.u]);
      else if (g.alpha == 0.5) reports[k] = lclt(*v.model, ctx.mu0, g.u, orc);
      else reports[k] = moderate_dev(*v.model, ctx.mu0, g.u, g.alpha, orc);
      if (g.alpha == 1.0 && std::isnan(constant[g.u])) reports[k].warnings.push_back("no theorem constant");
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }

  auto header = deviation_csv_header();
  header.push_back("error");
  Csv rows(header);
  Csv plot({"kind", "alpha", "u", "volume", "log_volume", "log_rel_residual"});
  nlohmann::json j = envelope("deviations", ctx);
  j["rows"] = nlohmann::json::array();
  int failed = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!failures[k].empty()) {
      ++failed;
      std::vector<std::string> r(header.size());
      r[0] = fmt_num(ctx.volumes[grid[k].vol].volume);
      r[1] = grid[k].alpha == 1.0 ? "precise-ld" : grid[k].alpha == 0.5 ? "lclt" : "moderate";
      r[2] = fmt_num(grid[k].alpha);
      r[3] = fmt_num(grid[k].u);
      r.back() = failures[k];
      rows.row(r);
      j["rows"].push_back({{"volume", ctx.volumes[grid[k].vol].volume}, {"alpha", grid[k].alpha}, {"u", grid[k].u},
                           {"error", failures[k]}});
      continue;
    }
    const auto& rep = reports[k];
    auto r = deviation_csv_row(rep);
    r.push_back("");
    rows.row(r);
    j["rows"].push_back(to_json(rep));
    if (rep.has_oracle && rep.oracle_residual > 0.0)
      plot.row({rep.kind, fmt_num(rep.spec.alpha), fmt_num(rep.spec.u), fmt_num(rep.volume), fmt_num(std::log(rep.volume)),
                fmt_num(std::log(rep.oracle_residual / rep.estimate))});
  }
  j["failed_rows"] = failed;
  write_atomic(out / "deviations.csv", rows.str());
  write_atomic(out / "deviation_scaling.csv", plot.str());
  write_atomic(out / "deviations.json", j.dump(2) + "\n");
  std::printf("%zu rows, %d failed\n", grid.size(), failed);
  return 0;
}

int cmd_validate(Context& ctx) {
  const fs::path out(ctx.out_dir);
  std::vector<Check> checks;
  auto add = [&](std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };

  if (ctx.infinite) {
    try {
      const DecayFit d = decay_fit(*ctx.infinite, ctx.rho_ref);
      add("decay_fit", !d.violation,
          "rho=" + fmt_num(ctx.rho_ref) + " c=" + fmt_num(d.c) + " star_ratio=" + fmt_num(d.star_ratio) +
              (d.reason.empty() ? "" : " " + d.reason));
    } catch (const FitError& e) {
      add("decay_fit", ctx.infinite->all_zero(), e.what());
    }
  }

  for (const auto& v : ctx.volumes) {
    const std::string tag = "V=" + fmt_num(v.volume) + " ";
    const FreeEnergyModel& m = *v.model;
    const double ratio = m.star_ratio(ctx.rho_ref);
    add(tag + "condition_star", ratio < 1.0, "rho*C/c0=" + fmt_num(ratio));
    if (!(ratio < 1.0)) continue;  // series checks are meaningless outside the window

    double worst = 0.0;
    for (long N = 1; N <= std::min<long>(10, static_cast<long>(v.volume) - 1); ++N) {
      const double rho = N / v.volume;
      const double lhs = m.beta() * (free_energy_f(m, N).value - cal_f(m, rho).value);
      worst = std::max(worst, std::abs(lhs - stirling_s(rho, v.volume)) / std::max(1.0, std::abs(lhs)));
    }
    add(tag + "free_energy_identity", worst <= 1e-12, "max rel=" + fmt_num(worst));

    try {
      const Ensemble ens = make_ensemble(m);
      const auto dp = duality_point(ens, ctx.mu0, &m);
      const auto pv = exact_probabilities(ens, ctx.mu0);
      double s = 0.0;
      for (double p : pv.p) s += p;
      add(tag + "probability_sum", std::abs(s - 1.0) <= 1e-10, "|sum-1|=" + fmt_num(std::abs(s - 1.0)));
      add(tag + "density_derivative", dp.density_derivative_residual <= 1e-4, fmt_num(dp.density_derivative_residual));
      add(tag + "variance_derivative", dp.variance_fd_residual <= 1e-4, fmt_num(dp.variance_fd_residual));
      const double gv = std::abs(gc_free_energy_second(ens, dp.rho_bar, ctx.mu0) * m.beta() * dp.sigma2 - 1.0);
      add(tag + "gc_variance_identity", gv <= 1e-3, fmt_num(gv));
      if (dp.N_star >= 1) {
        const auto kc = k_check(m, ens, ctx.mu0, dp.N_star, 0.5);
        add(tag + "k_identity", kc.identity_residual <= 1e-12, fmt_num(kc.identity_residual));
      }
      if (v.oracle) {
        const auto r = lclt(m, ctx.mu0, 0.0, &*v.oracle);
        add(tag + "lclt_oracle", r.within_budget,
            "rel=" + fmt_num(r.oracle_residual / r.oracle) + " budget_rel=" + fmt_num(r.budget / r.estimate));
      } else if (ctx.cfg.oracle == OracleKind::quadrature) {
        double bad = 0.0;
        for (long N = 1; N <= 4; ++N) {
          const auto q = quadrature_log_z(ctx.cfg.potential, ctx.cfg.beta, v.region, N, ctx.cfg.integration);
          const auto lz = log_z_canonical(m, N);
          bad = std::max(bad, std::abs(q.value - lz.value) - (lz.tail + q.error + 1e-8));
        }
        add(tag + "log_z_quadrature", bad <= 0.0, "excess=" + fmt_num(bad));
      }
    } catch (const Error& e) {
      add(tag + "duality", false, e.what());
    }
  }

  if (ctx.cfg.run_acceptance) {
    for (const auto& r : run_acceptance()) add("AC" + std::to_string(r.id), r.pass, r.detail);
  }

  nlohmann::json j = envelope("validate", ctx);
  j["checks"] = nlohmann::json::array();
  int failed = 0;
  for (const auto& c : checks) {
    std::printf("%s %s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    if (!c.pass) ++failed;
  }
  j["failed"] = failed;
  write_atomic(out / "validate.json", j.dump(2) + "\n");
  std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 4;
}

}  // namespace clusterdev::cli
