#pragma once

// Complex vector kernels used by every inner loop of the library.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2/FMA (x86-64) or NEON (aarch64) variant.  The variant is
// picked once at startup from CPU feature detection; tests may pin a variant
// with force_isa() to check equivalence against the scalar reference.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace gaborfio::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    // sum_i a[i] * conj(b[i])
    cplx (*dot_conj)(const cplx* a, const cplx* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
    // out[i] = a[i] * b[i]; out may alias a or b
    void (*multiply)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = a[i] * conj(b[i]); out may alias a or b
    void (*multiply_conj)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // sum_i |a[i]|^2
    double (*norm_sq)(const cplx* a, std::size_t n);
};

/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa);

/// Best supported variant, detected once.
Isa detected_isa();

/// Kernel table currently used by the span wrappers below.
const KernelTable& active();

/// Table for a specific variant. Throws std::invalid_argument if the variant
/// was not compiled in or the CPU lacks it.
const KernelTable& table_for(Isa isa);

/// Pins the active variant (tests, benchmarks). Returns the previous one.
Isa force_isa(Isa isa);

namespace scalar {
const KernelTable& table();
}
#if defined(GABORFIO_WITH_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(GABORFIO_WITH_NEON)
namespace neon {
const KernelTable& table();
}
#endif

inline cplx dot_conj(std::span<const cplx> a, std::span<const cplx> b)
{
    return active().dot_conj(a.data(), b.data(), a.size());
}

inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y)
{
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out)
{
    active().multiply(a.data(), b.data(), out.data(), a.size());
}

inline void multiply_conj(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out)
{
    active().multiply_conj(a.data(), b.data(), out.data(), a.size());
}

inline double norm_sq(std::span<const cplx> a)
{
    return active().norm_sq(a.data(), a.size());
}

} // namespace gaborfio::kernels
