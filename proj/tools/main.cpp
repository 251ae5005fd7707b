// Copyright 2026 The clusterdev Authors
// SPDX-License-Identifier: Apache-2.0
#include <omp.h>

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "clusterdev/errors.hpp"
#include "config.hpp"
#include "pipeline.hpp"

using namespace clusterdev;

namespace {
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clusterdev: cluster expansion coefficients and particle-number deviations"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out", table_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_given = false;

  for (const char* name : {"coeffs", "thermo", "duality", "deviations", "validate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override integration.seed");
    sub->add_option("--threads", threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);
    sub->add_option("--table", table_path, "cluster table JSON for coefficients.source = load");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  seed_given = app.get_subcommands().front()->count("--seed") > 0;
  if (threads > 0) omp_set_num_threads(threads);

  try {
    cli::RunConfig rc = cli::build_run_config(cli::ConfigFile::load(config_path));
    if (seed_given) {
      rc.seed = seed;
      rc.integration.seed = seed;
    }
    if (threads > 0) rc.integration.threads = threads;
    const bool need_inf = cmd == "coeffs" || cmd == "validate" || cmd == "duality";
    cli::Context ctx = cli::make_context(rc, out_dir, table_path, need_inf);
    if (cmd == "coeffs") return cli::cmd_coeffs(ctx);
    if (cmd == "thermo") return cli::cmd_thermo(ctx);
    if (cmd == "duality") return cli::cmd_duality(ctx);
    if (cmd == "deviations") return cli::cmd_deviations(ctx);
    return cli::cmd_validate(ctx);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
