#pragma once

// Point-parallel execution over independent indices. The parallel path writes
// per-index results into caller-owned storage; any reduction happens serially
// afterwards in index order, so results are byte-identical for every thread
// count. AECURV_THREADS caps the thread pool (1 forces the serial path,
// 0/unset uses all hardware threads).

#include <cstddef>

namespace aecurv {

enum class Exec { serial, parallel };

int max_threads();

namespace detail {
void par_for_impl(std::size_t count, void (*fn)(std::size_t, void*), void* ctx, Exec mode);
}

template <class F>
void par_for(std::size_t count, F&& f, Exec mode = Exec::parallel) {
    auto trampoline = [](std::size_t i, void* ctx) { (*static_cast<F*>(ctx))(i); };
    detail::par_for_impl(count, trampoline, &f, mode);
}

} // namespace aecurv
