#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ph1d {

// Every sweep kernel ships in two variants: the OpenMP one used by default and
// a serial reference the tests compare against. Results must be bitwise equal,
// which holds because each index writes only its own slot.
enum class Exec { serial, parallel };

// Exceptions must not escape an OpenMP region; the first one thrown is captured
// and rethrown after the loop.
template <class F>
void parallel_for(std::size_t n, Exec mode, F&& body) {
    if (mode == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr first_error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ph1d
