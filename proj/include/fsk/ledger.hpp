#pragma once

#include <atomic>
#include <cstdint>

namespace fsk {

// Scalar-transfer accounting for the two-level (slow/fast) memory model.
// Counters are commutative atomics so totals do not depend on how row blocks
// are scheduled across workers. The apply-category counters back the
// operation-count assertions of the streaming HVP oracle.
struct IoLedger {
    std::atomic<uint64_t> slow_to_fast_scalars{0};
    std::atomic<uint64_t> fast_to_slow_scalars{0};
    std::atomic<uint64_t> kernel_invocations{0};

    std::atomic<uint64_t> transport_vector_applies{0};   // P v / P^T u,   p == 1
    std::atomic<uint64_t> transport_matrix_applies{0};   // P V / P^T U,   p  > 1
    std::atomic<uint64_t> hadamard_applies{0};           // (P (.) A B^T) V

    void add_load(uint64_t scalars) {
        slow_to_fast_scalars.fetch_add(scalars, std::memory_order_relaxed);
    }
    void add_store(uint64_t scalars) {
        fast_to_slow_scalars.fetch_add(scalars, std::memory_order_relaxed);
    }

    uint64_t total_scalars() const {
        return slow_to_fast_scalars.load() + fast_to_slow_scalars.load();
    }

    void reset() {
        slow_to_fast_scalars = 0;
        fast_to_slow_scalars = 0;
        kernel_invocations = 0;
        transport_vector_applies = 0;
        transport_matrix_applies = 0;
        hadamard_applies = 0;
    }
};

}  // namespace fsk
