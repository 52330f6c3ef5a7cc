#include "gaborfio/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace gaborfio::kernels {
namespace {

bool cpu_has_avx2_fma()
{
#if defined(GABORFIO_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* best_table()
{
#if defined(GABORFIO_WITH_AVX2)
    if (cpu_has_avx2_fma())
        return &avx2::table();
#endif
#if defined(GABORFIO_WITH_NEON)
    return &neon::table();
#endif
    return &scalar::table();
}

std::atomic<const KernelTable*>& active_slot()
{
    static std::atomic<const KernelTable*> slot{best_table()};
    return slot;
}

} // namespace

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa)
{
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2_fma();
    case Isa::neon:
#if defined(GABORFIO_WITH_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detected_isa() { return best_table()->isa; }

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

const KernelTable& table_for(Isa isa)
{
    if (!isa_supported(isa))
        throw std::invalid_argument("kernel variant not available: " + std::string(isa_name(isa)));
    switch (isa) {
#if defined(GABORFIO_WITH_AVX2)
    case Isa::avx2: return avx2::table();
#endif
#if defined(GABORFIO_WITH_NEON)
    case Isa::neon: return neon::table();
#endif
    default: return scalar::table();
    }
}

Isa force_isa(Isa isa)
{
    const KernelTable* next = &table_for(isa);
    return active_slot().exchange(next)->isa;
}

} // namespace gaborfio::kernels
