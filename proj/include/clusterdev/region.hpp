#pragma once

#include <cmath>
#include <string>

namespace clusterdev {

// Box (-l/2, l/2]^d, or the infinite-volume marker.
struct SimulationRegion {
  int dim = 1;
  double side = 0.0;
  bool infinite = false;

  static SimulationRegion box(int d, double l);
  static SimulationRegion infinite_volume(int d = 1);

  double volume() const { return infinite ? INFINITY : std::pow(side, dim); }
  double boundary() const { return infinite ? INFINITY : 2.0 * dim * std::pow(side, dim - 1); }
  std::string describe() const;
};

}  // namespace clusterdev
