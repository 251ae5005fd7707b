#pragma once

#include <vector>

namespace clusterdev::kernels {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Cached n-point rule; thread safe.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_interval(const GaussRule& rule, double a, double b, F&& f) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
  return s * h;
}

}  // namespace clusterdev::kernels
