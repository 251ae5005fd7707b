#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "clusterdev/errors.hpp"

namespace clusterdev::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, int line, const std::string& key) {
  double v = 0.0;
  const auto t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("'" + key + "' expects a number, got '" + t + "'", line);
  return v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cf;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", line);
    if (section.empty()) throw ConfigError("key outside of any [section]", line);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", line);
    auto& sec = cf.data_[section];
    if (sec.count(key)) throw ConfigError("duplicate key '" + section + "." + key + "'", line);
    sec[key] = Entry{trim(s.substr(eq + 1)), line};
  }
  return cf;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.used = true;
  return &k->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_double(e->value, e->line, section + "." + key) : fallback;
}

long ConfigFile::get_long(const std::string& section, const std::string& key, long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  long v = 0;
  const auto& t = e->value;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("'" + section + "." + key + "' expects an integer, got '" + t + "'", e->line);
  return v;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  throw ConfigError("'" + section + "." + key + "' expects true or false", e->line);
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  std::vector<double> out;
  if (!e) return out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(item, e->line, section + "." + key));
  }
  return out;
}

void ConfigFile::check_unused() const {
  for (const auto& [section, keys] : data_)
    for (const auto& [key, entry] : keys)
      if (!entry.used) throw ConfigError("unknown key '" + section + "." + key + "'", entry.line);
}

std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::automatic: return "auto";
    case OracleKind::poisson: return "poisson";
    case OracleKind::tonks: return "tonks";
    case OracleKind::quadrature: return "quadrature";
    case OracleKind::none: return "none";
  }
  return "?";
}

RunConfig build_run_config(const ConfigFile& f) {
  RunConfig rc;
  auto line_of = [&](const char* s, const char* k) {
    const auto* e = f.find(s, k);
    return e ? e->line : 0;
  };

  // potential
  const std::string kind = f.get_string("potential", "kind", "zero");
  const double a = f.get_double("potential", "hard_core_radius", 0.0);
  const double R = f.get_double("potential", "range", a);
  const double depth = f.get_double("potential", "well_depth", 0.0);
  try {
    if (kind == "zero") {
      rc.potential = PairPotential::zero();
    } else if (kind == "hard-core" || kind == "hard_core") {
      rc.potential = PairPotential::hard_rod(a);
    } else if (kind == "square-well" || kind == "square_well") {
      rc.potential = PairPotential::square_well(a, R, depth);
    } else {
      throw ConfigError("unknown potential kind '" + kind + "'", line_of("potential", "kind"));
    }
    if (f.has("potential", "stability_B")) {
      rc.potential.stability_B = f.get_double("potential", "stability_B", 0.0);
      rc.potential.validate();
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what(), line_of("potential", "kind"));
  }

  // system
  rc.beta = f.get_double("system", "beta", 1.0);
  if (!(rc.beta > 0.0)) throw ConfigError("beta must be > 0", line_of("system", "beta"));
  rc.dimension = static_cast<int>(f.get_long("system", "dimension", 1));
  if (rc.dimension < 1 || rc.dimension > 3) throw ConfigError("dimension must be 1, 2 or 3", line_of("system", "dimension"));
  rc.volumes = f.get_list("system", "volumes");
  if (rc.volumes.empty()) throw ConfigError("system.volumes must list at least one volume", line_of("system", "volumes"));
  for (double v : rc.volumes)
    if (!(v > 0.0)) throw ConfigError("volumes must be > 0", line_of("system", "volumes"));
  if (f.has("system", "mu0")) rc.mu0 = f.get_double("system", "mu0", 0.0);
  if (f.has("system", "density")) {
    rc.density = f.get_double("system", "density", 0.0);
    if (!(*rc.density > 0.0)) throw ConfigError("density must be > 0", line_of("system", "density"));
  }
  if (rc.mu0 && rc.density) throw ConfigError("give either mu0 or density, not both", line_of("system", "density"));
  if (!rc.mu0 && !rc.density) throw ConfigError("system needs mu0 or density");

  // coefficients
  const std::string src = f.get_string("coefficients", "source", "compute");
  if (src == "compute") rc.source = TableSource::compute;
  else if (src == "load") rc.source = TableSource::load;
  else if (src == "oracle-fit") rc.source = TableSource::oracle_fit;
  else throw ConfigError("coefficients.source must be compute, load or oracle-fit", line_of("coefficients", "source"));
  const std::string mode = f.get_string("coefficients", "mode", "polymer");
  if (mode == "polymer") rc.mode = TableMode::polymer_exact;
  else if (mode == "two-connected") rc.mode = TableMode::two_connected;
  else throw ConfigError("coefficients.mode must be polymer or two-connected", line_of("coefficients", "mode"));
  rc.n_max = static_cast<int>(f.get_long("coefficients", "n_max", 4));
  if (rc.n_max < 1 || rc.n_max > 6) throw ConfigError("coefficients.n_max must be in 1..6", line_of("coefficients", "n_max"));
  rc.n_max_infinite = static_cast<int>(f.get_long("coefficients", "n_max_infinite", std::max(rc.n_max, 5)));
  if (rc.n_max_infinite < 1 || rc.n_max_infinite > 6)
    throw ConfigError("coefficients.n_max_infinite must be in 1..6", line_of("coefficients", "n_max_infinite"));
  rc.table_path = f.get_string("coefficients", "table", "");

  // integration
  const std::string scheme = f.get_string("integration", "scheme", "tensor");
  if (scheme == "tensor") rc.integration.scheme = Scheme::tensor_quadrature;
  else if (scheme == "monte-carlo") rc.integration.scheme = Scheme::monte_carlo;
  else throw ConfigError("integration.scheme must be tensor or monte-carlo", line_of("integration", "scheme"));
  rc.integration.points = static_cast<int>(f.get_long("integration", "points", 0));
  const long samples = f.get_long("integration", "samples", 1L << 20);
  if (samples < 1) throw ConfigError("integration.samples must be >= 1", line_of("integration", "samples"));
  rc.integration.samples = static_cast<std::uint64_t>(samples);
  const long seed = f.get_long("integration", "seed", 20260101);
  if (seed < 0) throw ConfigError("integration.seed must be >= 0", line_of("integration", "seed"));
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.integration.seed = rc.seed;

  // deviations
  rc.alphas = f.get_list("deviations", "alphas");
  for (double al : rc.alphas)
    if (!(al >= 0.5 && al <= 1.0)) throw ConfigError("alphas must lie in [0.5, 1]", line_of("deviations", "alphas"));
  rc.us = f.get_list("deviations", "us");
  const std::string tc = f.get_string("deviations", "theorem_constant", "auto");
  if (tc != "auto") rc.theorem_constant = f.get_double("deviations", "theorem_constant", 0.0);

  // oracle
  const std::string ok = f.get_string("oracle", "kind", "auto");
  if (ok == "auto") rc.oracle = OracleKind::automatic;
  else if (ok == "poisson") rc.oracle = OracleKind::poisson;
  else if (ok == "tonks") rc.oracle = OracleKind::tonks;
  else if (ok == "quadrature") rc.oracle = OracleKind::quadrature;
  else if (ok == "none") rc.oracle = OracleKind::none;
  else throw ConfigError("oracle.kind must be auto, poisson, tonks, quadrature or none", line_of("oracle", "kind"));
  if (rc.oracle == OracleKind::automatic) {
    if (rc.potential.is_zero()) rc.oracle = OracleKind::poisson;
    else if (rc.potential.pure_hard_core() && rc.dimension == 1) rc.oracle = OracleKind::tonks;
    else rc.oracle = OracleKind::quadrature;
  }
  if (rc.oracle == OracleKind::poisson && !rc.potential.is_zero())
    throw ConfigError("the Poisson oracle needs the zero potential", line_of("oracle", "kind"));
  if (rc.oracle == OracleKind::tonks && !(rc.potential.pure_hard_core() && rc.dimension == 1))
    throw ConfigError("the Tonks oracle needs a hard core in one dimension", line_of("oracle", "kind"));

  rc.run_acceptance = f.get_bool("validate", "acceptance", false);
  f.check_unused();
  return rc;
}

}  // namespace clusterdev::cli
