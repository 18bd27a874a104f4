#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drtsoh::par {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Set the OpenMP thread count (n <= 0 leaves the runtime default).
inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// OpenMP-parallel index loop. Each index writes only its own outputs, so the
// result is bitwise identical to the serial loop for any thread count.
// Exceptions are captured and rethrown after the region ends.
template <class F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
    std::exception_ptr err = nullptr;
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) shared(err)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(drtsoh_parallel_for_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
#else
    for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

/// Serial reference loop with the same contract as parallel_for.
template <class F>
void serial_for(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

} // namespace drtsoh::par
