#include "fsk/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fsk {

namespace {
std::atomic<std::size_t> g_threads{0};

std::size_t env_threads() {
    if (const char* s = std::getenv("FSK_THREADS")) {
        long v = std::atol(s);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    std::size_t hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}
}  // namespace

void set_num_threads(std::size_t n) { g_threads.store(n == 0 ? 1 : n); }

std::size_t num_threads() {
    std::size_t n = g_threads.load();
    return n == 0 ? env_threads() : n;
}

namespace detail {

void run_parallel(std::size_t nblocks, std::size_t nworkers,
                  void (*trampoline)(void*, std::size_t), void* ctx) {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
        pool.emplace_back([=] {
            for (std::size_t b = w; b < nblocks; b += nworkers) trampoline(ctx, b);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace fsk
