// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached through the
// dispatcher after a CPU feature check.

#include "gaborfio/kernels.hpp"

#include <immintrin.h>

namespace gaborfio::kernels::avx2 {
namespace {

// Two complex doubles per __m256d: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n)
{
    // acc_re lanes: [ar*br, ai*bi, ...]   -> real part is the full sum
    // acc_im lanes: [ar*bi, ai*br, ...]   -> imag part is odd minus even lanes
    __m256d re0 = _mm256_setzero_pd(), re1 = _mm256_setzero_pd();
    __m256d im0 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a0 = load2(a + i), a1 = load2(a + i + 2);
        const __m256d b0 = load2(b + i), b1 = load2(b + i + 2);
        re0 = _mm256_fmadd_pd(a0, b0, re0);
        re1 = _mm256_fmadd_pd(a1, b1, re1);
        im0 = _mm256_fmadd_pd(a0, swap_re_im(b0), im0);
        im1 = _mm256_fmadd_pd(a1, swap_re_im(b1), im1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d a0 = load2(a + i), b0 = load2(b + i);
        re0 = _mm256_fmadd_pd(a0, b0, re0);
        im0 = _mm256_fmadd_pd(a0, swap_re_im(b0), im0);
    }
    const __m256d re = _mm256_add_pd(re0, re1);
    const __m256d im = _mm256_add_pd(im0, im1);
    const __m256d sign = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
    double sre = hsum(re);
    double sim = hsum(_mm256_mul_pd(im, sign));
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        sre += ar * br + ai * bi;
        sim += ai * br - ar * bi;
    }
    return {sre, sim};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n)
{
    const double p = alpha.real(), q = alpha.imag();
    const __m256d vp = _mm256_set1_pd(p);
    const __m256d vq = _mm256_setr_pd(-q, q, -q, q);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = load2(x + i);
        __m256d vy = load2(y + i);
        vy = _mm256_fmadd_pd(vp, vx, vy);
        vy = _mm256_fmadd_pd(vq, swap_re_im(vx), vy);
        store2(y + i, vy);
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + p * xr - q * xi, y[i].imag() + p * xi + q * xr};
    }
}

void multiply(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i), vb = load2(b + i);
        const __m256d br = _mm256_movedup_pd(vb);
        const __m256d bi = _mm256_permute_pd(vb, 0b1111);
        // even: ar*br - ai*bi, odd: ai*br + ar*bi
        store2(out + i, _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(swap_re_im(va), bi)));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

void multiply_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i), vb = load2(b + i);
        const __m256d br = _mm256_movedup_pd(vb);
        const __m256d bi = _mm256_permute_pd(vb, 0b1111);
        // even: ar*br + ai*bi, odd: ai*br - ar*bi
        store2(out + i, _mm256_fmsubadd_pd(va, br, _mm256_mul_pd(swap_re_im(va), bi)));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br + ai * bi, ai * br - ar * bi};
    }
}

double norm_sq(const cplx* a, std::size_t n)
{
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a0 = load2(a + i), a1 = load2(a + i + 2);
        s0 = _mm256_fmadd_pd(a0, a0, s0);
        s1 = _mm256_fmadd_pd(a1, a1, s1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d a0 = load2(a + i);
        s0 = _mm256_fmadd_pd(a0, a0, s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i)
        s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

} // namespace

const KernelTable& table()
{
    static const KernelTable t{Isa::avx2, dot_conj, axpy, multiply, multiply_conj, norm_sq};
    return t;
}

} // namespace gaborfio::kernels::avx2
