#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterdev/cluster_coeffs.hpp"
#include "clusterdev/integration.hpp"
#include "clusterdev/potentials.hpp"

namespace clusterdev::cli {

// Flat "key = value" lines grouped under [section] headers; '#' starts a comment.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  // Throws on keys nobody read.
  void check_unused() const;

 private:
  std::map<std::string, std::map<std::string, Entry>> data_;
};

enum class TableSource { compute, load, oracle_fit };
enum class OracleKind { automatic, poisson, tonks, quadrature, none };

struct RunConfig {
  PairPotential potential;
  double beta = 1.0;
  int dimension = 1;
  std::vector<double> volumes;
  std::optional<double> mu0;
  std::optional<double> density;
  TableSource source = TableSource::compute;
  TableMode mode = TableMode::polymer_exact;
  int n_max = 4;
  int n_max_infinite = 5;
  std::string table_path;
  IntegrationConfig integration;
  std::vector<double> alphas;
  std::vector<double> us;
  std::optional<double> theorem_constant;  // empty: calibrate
  OracleKind oracle = OracleKind::automatic;
  bool run_acceptance = false;
  std::uint64_t seed = 20260101;
};

RunConfig build_run_config(const ConfigFile& file);

std::string to_string(OracleKind k);

}  // namespace clusterdev::cli
