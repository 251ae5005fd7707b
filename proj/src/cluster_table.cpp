#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "clusterdev/cluster_coeffs.hpp"
#include "clusterdev/errors.hpp"
#include "clusterdev/thermo.hpp"

namespace clusterdev {

ClusterTable fit_coefficients_from_oracle(const std::vector<double>& log_z, double beta,
                                          const SimulationRegion& region, int n_max, double max_condition) {
  if (region.infinite) throw ArgumentError("oracle fit needs a finite region");
  const int n_fit = static_cast<int>(log_z.size());
  if (n_max < 1) throw ArgumentError("n_max must be >= 1");
  if (n_fit < n_max + 1) throw ArgumentError("oracle fit needs N_fit >= n_max + 1");
  const double vol = region.volume();
  Eigen::MatrixXd A(n_fit, n_max);
  Eigen::VectorXd y(n_fit);
  for (int N = 1; N <= n_fit; ++N) {
    y(N - 1) = log_z[N - 1] - (N * std::log(vol) - std::lgamma(N + 1.0));
    for (int n = 1; n <= n_max; ++n) A(N - 1, n - 1) = N * p_poly(N, vol, n) / (n + 1);
  }
  // Column equilibration before judging the conditioning.
  Eigen::VectorXd scale(n_max);
  for (int n = 0; n < n_max; ++n) {
    scale(n) = A.col(n).norm();
    if (scale(n) == 0.0) throw FitError("oracle fit: column " + std::to_string(n + 1) + " vanishes");
  }
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cond = s(0) / s(s.size() - 1);
  if (!(cond <= max_condition)) throw FitError("oracle fit ill-conditioned (condition " + std::to_string(cond) + ")");
  const Eigen::VectorXd bs = svd.solve(y);
  const Eigen::VectorXd b = bs.cwiseQuotient(scale);

  ClusterTable t;
  t.beta = beta;
  t.region = region;
  t.n_max = n_max;
  t.mode = TableMode::oracle_fitted;
  for (int n = 0; n < n_max; ++n) {
    t.values.push_back(b(n));
    t.uncertainty.push_back(0.0);
    t.route.push_back("oracle-fit");
  }
  t.fit_residual = (A * b - y).norm();
  // Rough standard errors from the residual.
  if (n_fit > n_max) {
    const double sigma2 = t.fit_residual * t.fit_residual / (n_fit - n_max);
    const Eigen::MatrixXd cov =
        svd.matrixV() * s.cwiseInverse().cwiseAbs2().asDiagonal() * svd.matrixV().transpose();
    for (int n = 0; n < n_max; ++n) t.uncertainty[n] = std::sqrt(sigma2 * cov(n, n)) / scale(n);
  }
  fit_tail_envelope(t);
  return t;
}

DecayFit decay_fit(const ClusterTable& table, double rho_reference) {
  if (!(rho_reference > 0.0)) throw ArgumentError("reference density must be > 0");
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= table.n_max; ++n) {
    double weight;
    if (table.region.infinite) {
      weight = std::pow(rho_reference, n);
    } else {
      const double vol = table.region.volume();
      weight = p_poly(static_cast<long>(std::floor(rho_reference * vol)), vol, n);
    }
    const double F = weight * table.values[n - 1] / (n + 1);
    if (F != 0.0 && std::isfinite(F)) pts.push_back({static_cast<double>(n), std::log(std::abs(F))});
  }
  if (pts.size() < 3) throw FitError("decay fit: insufficient data (fewer than 3 nonzero coefficients)");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  DecayFit out;
  out.points = static_cast<int>(pts.size());
  out.c = -slope;
  out.intercept = (sy - slope * sx) / k;
  double logC = -INFINITY;
  for (auto [x, y] : pts) logC = std::max(logC, y + out.c * x);
  out.C = std::exp(logC);
  out.decays = out.c > 0.0;
  const StarCheck star = check_condition_star(rho_reference, table.c_beta, table.c0);
  out.star_ratio = star.ratio;
  if (!out.decays) out.reason = "non-decaying coefficient sequence";
  if (!star.ok) {
    if (!out.reason.empty()) out.reason += "; ";
    out.reason += "convergence condition violated (rho*C(beta)/c0 = " + std::to_string(star.ratio) + ")";
  }
  out.violation = !out.decays || !star.ok;
  return out;
}

nlohmann::json potential_to_json(const PairPotential& p) {
  nlohmann::json j;
  j["kind"] = to_string(p.kind);
  j["hard_core_radius"] = p.hard_core_radius;
  j["range"] = p.range;
  j["well_depth"] = p.well_depth;
  j["stability_B"] = p.stability_B;
  if (p.kind == PotentialKind::tabulated) {
    j["tab_r"] = p.tab_r;
    j["tab_v"] = p.tab_v;
  }
  return j;
}

PairPotential potential_from_json(const nlohmann::json& j) {
  PairPotential p;
  p.kind = potential_kind_from_string(j.at("kind").get<std::string>());
  p.hard_core_radius = j.value("hard_core_radius", 0.0);
  p.range = j.value("range", 0.0);
  p.well_depth = j.value("well_depth", 0.0);
  p.stability_B = j.value("stability_B", 0.0);
  if (j.contains("tab_r")) p.tab_r = j["tab_r"].get<std::vector<double>>();
  if (j.contains("tab_v")) p.tab_v = j["tab_v"].get<std::vector<double>>();
  p.validate();
  return p;
}

nlohmann::json to_json(const ClusterTable& t) {
  nlohmann::json j;
  j["schema"] = "clusterdev.cluster_table";
  j["schema_version"] = kClusterTableSchema;
  j["beta"] = t.beta;
  j["region"] = {{"dim", t.region.dim}, {"side", t.region.side}, {"infinite", t.region.infinite}};
  j["mode"] = to_string(t.mode);
  j["n_max"] = t.n_max;
  j["values"] = t.values;
  j["uncertainty"] = t.uncertainty;
  j["route"] = t.route;
  j["potential"] = potential_to_json(t.potential);
  j["c_beta"] = t.c_beta;
  j["c0"] = t.c0;
  j["tail"] = {{"C", t.tail_C}, {"c", t.tail_c}, {"fitted", t.tail_fitted}};
  j["seed"] = t.seed;
  j["fit_residual"] = t.fit_residual;
  return j;
}

ClusterTable table_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != kClusterTableSchema)
    throw ArgumentError("unsupported cluster table schema version");
  ClusterTable t;
  t.beta = j.at("beta").get<double>();
  const auto& r = j.at("region");
  t.region.dim = r.at("dim").get<int>();
  t.region.side = r.at("side").get<double>();
  t.region.infinite = r.at("infinite").get<bool>();
  t.mode = table_mode_from_string(j.at("mode").get<std::string>());
  t.n_max = j.at("n_max").get<int>();
  t.values = j.at("values").get<std::vector<double>>();
  t.uncertainty = j.at("uncertainty").get<std::vector<double>>();
  t.route = j.value("route", std::vector<std::string>(t.values.size(), to_string(t.mode)));
  if (static_cast<int>(t.values.size()) != t.n_max || t.uncertainty.size() != t.values.size())
    throw ArgumentError("cluster table rows do not match n_max");
  t.potential = potential_from_json(j.at("potential"));
  t.c_beta = j.value("c_beta", 0.0);
  t.c0 = j.value("c0", 1.0);
  const auto& tail = j.at("tail");
  t.tail_C = tail.at("C").get<double>();
  t.tail_c = tail.at("c").get<double>();
  t.tail_fitted = tail.at("fitted").get<bool>();
  t.seed = j.value("seed", std::uint64_t{0});
  t.fit_residual = j.value("fit_residual", 0.0);
  return t;
}

void save_table(const ClusterTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  out << to_json(t).dump(2) << '\n';
}

ClusterTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed table " + path + ": " + e.what());
  }
  return table_from_json(j);
}

}  // namespace clusterdev
