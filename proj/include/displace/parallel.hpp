#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace displace {

/// Resolves a requested worker count: values <= 0 mean "all available cores".
inline int effective_threads(int requested) {
#ifdef _OPENMP
    if (requested <= 0) return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

} // namespace displace
