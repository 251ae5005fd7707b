#pragma once

#include <cstdint>

namespace clusterdev {

enum class Scheme { tensor_quadrature, monte_carlo };

struct IntegrationConfig {
  Scheme scheme = Scheme::tensor_quadrature;
  // Gauss-Legendre points per sub-interval for smooth pieces; 0 picks the
  // exact order for piecewise-constant integrands.
  int points = 0;
  std::uint64_t samples = 1u << 20;
  std::uint64_t seed = 20260101;
  double rel_tol = 1e-8;
  int threads = 0;  // 0: OpenMP default
  bool parallel = true;
};

struct QuadratureValue {
  double value = 0.0;
  double error = 0.0;
};

}  // namespace clusterdev
