#include "clusterdev/region.hpp"

#include <sstream>

#include "clusterdev/errors.hpp"

namespace clusterdev {

SimulationRegion SimulationRegion::box(int d, double l) {
  if (d < 1) throw ArgumentError("region dimension must be >= 1");
  if (!(l > 0.0)) throw ArgumentError("region side must be > 0");
  return {d, l, false};
}

SimulationRegion SimulationRegion::infinite_volume(int d) {
  if (d < 1) throw ArgumentError("region dimension must be >= 1");
  return {d, 0.0, true};
}

std::string SimulationRegion::describe() const {
  if (infinite) return "infinite(d=" + std::to_string(dim) + ")";
  std::ostringstream os;
  os << "box(d=" << dim << ", l=" << side << ")";
  return os.str();
}

}  // namespace clusterdev
