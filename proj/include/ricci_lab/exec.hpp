#pragma once

// Point-wise map over sample indices, serial or OpenMP-parallel.
//
// Both paths write result i into slot i, so any reduction done afterwards by
// the caller sees the same sequence regardless of thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ricci_lab {

enum class Exec { serial, parallel };

/// Thread cap from RICCI_LAB_THREADS (0 means the OpenMP default).
int thread_cap();

template <class R, class F>
std::vector<R> map_indices(std::size_t count, F&& f, Exec exec = Exec::parallel) {
    std::vector<R> out(count);
    if (exec == Exec::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const long long n = static_cast<long long>(count);
#ifdef _OPENMP
    const int cap = thread_cap();
    const int threads = cap > 0 ? cap : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace ricci_lab
