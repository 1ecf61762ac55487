#include "reglab/simd/simd.hpp"

#include <atomic>
#include <cstdlib>

namespace reglab::simd {

const KernelTable* avx2_table(); // null when the CPU or build lacks AVX2+FMA
const KernelTable* neon_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* lookup(std::string_view name) {
    if (name == "scalar") {
        return &scalar_table();
    }
    if (name == "avx2" && cpu_has_avx2()) {
        return avx2_table();
    }
    if (name == "neon") {
        return neon_table();
    }
    return nullptr;
}

const KernelTable* pick_default() {
    if (const char* forced = std::getenv("REGLAB_SIMD")) {
        if (const KernelTable* t = lookup(forced)) {
            return t;
        }
    }
    if (cpu_has_avx2()) {
        if (const KernelTable* t = avx2_table()) {
            return t;
        }
    }
    if (const KernelTable* t = neon_table()) {
        return t;
    }
    return &scalar_table();
}

std::atomic<const KernelTable*>& selection() {
    static std::atomic<const KernelTable*> current{pick_default()};
    return current;
}

} // namespace

const KernelTable& active() { return *selection().load(std::memory_order_acquire); }

bool set_active(std::string_view name) {
    if (const KernelTable* t = lookup(name)) {
        selection().store(t, std::memory_order_release);
        return true;
    }
    return false;
}

std::vector<const KernelTable*> available() {
    std::vector<const KernelTable*> tables{&scalar_table()};
    if (cpu_has_avx2()) {
        if (const KernelTable* t = avx2_table()) {
            tables.push_back(t);
        }
    }
    if (const KernelTable* t = neon_table()) {
        tables.push_back(t);
    }
    return tables;
}

} // namespace reglab::simd
