#pragma once

#include <omp.h>

namespace clusterdev {

inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace clusterdev
