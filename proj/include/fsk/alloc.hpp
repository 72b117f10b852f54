#pragma once

#include <cstdint>

namespace fsk::alloc {

// Heap statistics fed by the optional operator-new hook (fsk_alloc_hook
// library). When the hook is not linked, tracking_available() is false and
// the counters stay at zero.
bool tracking_available();
uint64_t current_bytes();
uint64_t peak_bytes();
void reset_peak();

namespace detail {
void record_alloc(uint64_t bytes);
void record_free(uint64_t bytes);
void mark_available();
}  // namespace detail

}  // namespace fsk::alloc
