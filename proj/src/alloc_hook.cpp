// Global operator new/delete override that reports every allocation to the
// fsk::alloc counters. Each block carries a 16-byte header holding its size.
// Link this object only into binaries that report peak memory.

#include <cstdlib>
#include <new>

#include "fsk/alloc.hpp"

namespace {

constexpr std::size_t kHeader = 16;  // keeps max_align_t alignment

struct HookInit {
    HookInit() { fsk::alloc::detail::mark_available(); }
};
HookInit g_init;

void* tracked_alloc(std::size_t size) {
    void* raw = std::malloc(size + kHeader);
    if (!raw) throw std::bad_alloc();
    *static_cast<std::size_t*>(raw) = size;
    fsk::alloc::detail::record_alloc(size);
    return static_cast<char*>(raw) + kHeader;
}

void tracked_free(void* ptr) noexcept {
    if (!ptr) return;
    void* raw = static_cast<char*>(ptr) - kHeader;
    fsk::alloc::detail::record_free(*static_cast<std::size_t*>(raw));
    std::free(raw);
}

}  // namespace

void* operator new(std::size_t size) { return tracked_alloc(size); }
void* operator new[](std::size_t size) { return tracked_alloc(size); }
void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
    try {
        return tracked_alloc(size);
    } catch (...) {
        return nullptr;
    }
}
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
    try {
        return tracked_alloc(size);
    } catch (...) {
        return nullptr;
    }
}

void operator delete(void* ptr) noexcept { tracked_free(ptr); }
void operator delete[](void* ptr) noexcept { tracked_free(ptr); }
void operator delete(void* ptr, std::size_t) noexcept { tracked_free(ptr); }
void operator delete[](void* ptr, std::size_t) noexcept { tracked_free(ptr); }
void operator delete(void* ptr, const std::nothrow_t&) noexcept { tracked_free(ptr); }
void operator delete[](void* ptr, const std::nothrow_t&) noexcept { tracked_free(ptr); }
