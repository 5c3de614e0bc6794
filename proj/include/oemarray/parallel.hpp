#pragma once

// Frequency-sweep kernels. Every spectrum in the library is a map over
// independent frequency points; the serial path is the reference the
// OpenMP path is tested against.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oem {

enum class Execution { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// out[i] = fn(xs[i]). Output ordering never depends on the thread count.
template <class T, class Fn>
std::vector<T> map_points(const std::vector<double>& xs, Fn&& fn, Execution exec) {
    std::vector<T> out(xs.size());
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
    if (exec == Execution::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(xs[i]);
        return out;
    }
    // Exceptions must not escape the parallel region; the first one is
    // rethrown after the loop.
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = fn(xs[i]);
        } catch (...) {
#pragma omp critical(oem_map_points_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace oem
