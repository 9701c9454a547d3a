#include "aecurv/parallel.hpp"

#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aecurv {

int max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("AECURV_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0 && v < 1024) return static_cast<int>(v);
    }
    return static_cast<int>(hw);
}

namespace detail {

void par_for_impl(std::size_t count, void (*fn)(std::size_t, void*), void* ctx, Exec mode) {
    const int threads = (mode == Exec::serial) ? 1 : max_threads();
#ifdef _OPENMP
    if (threads > 1 && count > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            fn(static_cast<std::size_t>(i), ctx);
        return;
    }
#endif
    (void)threads;
    for (std::size_t i = 0; i < count; ++i) fn(i, ctx);
}

} // namespace detail
} // namespace aecurv
