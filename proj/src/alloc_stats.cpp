#include "fsk/alloc.hpp"

#include <atomic>

namespace fsk::alloc {

namespace {
std::atomic<uint64_t> g_current{0};
std::atomic<uint64_t> g_peak{0};
std::atomic<bool> g_available{false};
}  // namespace

bool tracking_available() { return g_available.load(std::memory_order_relaxed); }
uint64_t current_bytes() { return g_current.load(std::memory_order_relaxed); }
uint64_t peak_bytes() { return g_peak.load(std::memory_order_relaxed); }

void reset_peak() { g_peak.store(g_current.load(std::memory_order_relaxed)); }

namespace detail {

void record_alloc(uint64_t bytes) {
    const uint64_t now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    uint64_t peak = g_peak.load(std::memory_order_relaxed);
    while (now > peak &&
           !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
    }
}

void record_free(uint64_t bytes) { g_current.fetch_sub(bytes, std::memory_order_relaxed); }

void mark_available() { g_available.store(true, std::memory_order_relaxed); }

}  // namespace detail

}  // namespace fsk::alloc
