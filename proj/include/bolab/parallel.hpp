#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bolab {

// Exec::serial runs the plain reference loop; Exec::parallel distributes the
// same per-index kernel over OpenMP threads. Kernels write disjoint outputs, so
// both paths produce bit-identical results.
enum class Exec { serial, parallel };

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class Fn>
void for_each_index(std::size_t count, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    // Exceptions may not cross the OpenMP region; keep the first and rethrow.
    std::exception_ptr failure;
    const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(bolab_for_each_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace bolab
