#include "doctest.h"

#include "clusterdev/errors.hpp"
#include "config.hpp"

using namespace clusterdev;
using namespace clusterdev::cli;

namespace {
int error_line(const std::string& text) {
  try {
    build_run_config(ConfigFile::parse(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("config parsing") {
  const auto rc = build_run_config(ConfigFile::parse(R"(
# comment
[potential]
kind = hard-core   # trailing comment
hard_core_radius = 1
[system]
volumes = 50, 100
density = 0.03
[deviations]
alphas = 0.5, 1
us =
theorem_constant = 2.5
)"));
  CHECK(rc.potential.kind == PotentialKind::hard_core);
  CHECK(rc.volumes == std::vector<double>{50.0, 100.0});
  CHECK(rc.density.value() == 0.03);
  CHECK(rc.us.empty());
  CHECK(rc.theorem_constant.value() == 2.5);
  CHECK(rc.oracle == OracleKind::tonks);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("[system]\nbeta = -1\nvolumes = 10\nmu0 = 0\n") == 2);
  CHECK(error_line("[system]\nvolumes = 10\nmu0 = 0\nnonsense\n") == 4);
  CHECK(error_line("beta = 1\n") == 1);
  CHECK(error_line("[system]\nvolumes = 10, x\nmu0 = 0\n") == 2);
  CHECK(error_line("[system]\nvolumes = 10\nmu0 = 0\ntypo_key = 3\n") == 4);
  CHECK(error_line("[system]\nvolumes = 10\nmu0 = 0\nmu0 = 1\n") == 4);
  CHECK(error_line("[potential]\nkind = plasma\n[system]\nvolumes = 10\nmu0 = 0\n") == 2);
  CHECK(error_line("[system]\nvolumes = 10\nmu0 = 0\n[oracle]\nkind = tonks\n") == 5);
}
