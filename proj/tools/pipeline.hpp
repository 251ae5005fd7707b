#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clusterdev/thermo.hpp"
#include "config.hpp"

namespace clusterdev::cli {

struct VolumeEntry {
  double volume = 0.0;
  SimulationRegion region;
  std::shared_ptr<FreeEnergyModel> model;
  std::optional<Ensemble> oracle;  // grand-canonical oracle when one exists
};

struct Context {
  RunConfig cfg;
  std::string out_dir;
  std::string table_override;
  double mu0 = 0.0;
  double rho_ref = 0.0;  // density used for the convergence checks
  std::vector<VolumeEntry> volumes;
  std::optional<ClusterTable> infinite;
};

// Builds tables and oracles for every volume of the sweep.
Context make_context(const RunConfig& cfg, const std::string& out_dir, const std::string& table_override,
                     bool need_infinite);

// Throws RegimeError when the reference density fails condition (star) in any volume.
void require_convergent(const Context& ctx);

int cmd_coeffs(Context& ctx);
int cmd_thermo(Context& ctx);
int cmd_duality(Context& ctx);
int cmd_deviations(Context& ctx);
int cmd_validate(Context& ctx);

}  // namespace clusterdev::cli
