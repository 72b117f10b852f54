#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace fsk {

// Worker cap for kernel-level block parallelism. Resolution order:
// set_num_threads() (CLI --threads), then the FSK_THREADS environment
// variable, then hardware concurrency.
void set_num_threads(std::size_t n);
std::size_t num_threads();

namespace detail {
void run_parallel(std::size_t nblocks, std::size_t nworkers,
                  void (*trampoline)(void*, std::size_t), void* ctx);
}

// Runs fn(block) for block in [0, nblocks). Blocks are distributed in fixed
// strides; every block's work is sequential internally, so results are
// identical for any worker count. The first exception thrown by any block is
// rethrown after all workers join.
template <typename F>
void parallel_for_blocks(std::size_t nblocks, F&& fn) {
    std::size_t workers = num_threads();
    if (workers > nblocks) workers = nblocks;
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    struct Shared {
        F* fn;
        std::mutex mu;
        std::exception_ptr err;
    } shared{&fn, {}, nullptr};
    auto tramp = [](void* ctx, std::size_t b) {
        auto* s = static_cast<Shared*>(ctx);
        try {
            (*s->fn)(b);
        } catch (...) {
            std::lock_guard<std::mutex> lock(s->mu);
            if (!s->err) s->err = std::current_exception();
        }
    };
    detail::run_parallel(nblocks, workers, tramp, &shared);
    if (shared.err) std::rethrow_exception(shared.err);
}

}  // namespace fsk
