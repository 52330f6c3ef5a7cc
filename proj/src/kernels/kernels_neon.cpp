// NEON variants for aarch64. One complex double per float64x2_t.

#include "gaborfio/kernels.hpp"

#include <arm_neon.h>

namespace gaborfio::kernels::neon {
namespace {

inline float64x2_t load1(const cplx* p) { return vld1q_f64(reinterpret_cast<const double*>(p)); }
inline void store1(cplx* p, float64x2_t v) { vst1q_f64(reinterpret_cast<double*>(p), v); }
inline float64x2_t swap_re_im(float64x2_t v) { return vextq_f64(v, v, 1); }

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n)
{
    float64x2_t re0 = vdupq_n_f64(0.0), re1 = vdupq_n_f64(0.0);
    float64x2_t im0 = vdupq_n_f64(0.0), im1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a0 = load1(a + i), a1 = load1(a + i + 1);
        const float64x2_t b0 = load1(b + i), b1 = load1(b + i + 1);
        re0 = vfmaq_f64(re0, a0, b0);
        re1 = vfmaq_f64(re1, a1, b1);
        im0 = vfmaq_f64(im0, a0, swap_re_im(b0));
        im1 = vfmaq_f64(im1, a1, swap_re_im(b1));
    }
    for (; i < n; ++i) {
        const float64x2_t a0 = load1(a + i), b0 = load1(b + i);
        re0 = vfmaq_f64(re0, a0, b0);
        im0 = vfmaq_f64(im0, a0, swap_re_im(b0));
    }
    const float64x2_t re = vaddq_f64(re0, re1);
    const float64x2_t im = vaddq_f64(im0, im1);
    // im lanes: [ar*bi, ai*br]
    return {vgetq_lane_f64(re, 0) + vgetq_lane_f64(re, 1), vgetq_lane_f64(im, 1) - vgetq_lane_f64(im, 0)};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n)
{
    const float64x2_t vp = vdupq_n_f64(alpha.real());
    const double qq[2] = {-alpha.imag(), alpha.imag()};
    const float64x2_t vq = vld1q_f64(qq);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t vx = load1(x + i);
        float64x2_t vy = load1(y + i);
        vy = vfmaq_f64(vy, vp, vx);
        vy = vfmaq_f64(vy, vq, swap_re_im(vx));
        store1(y + i, vy);
    }
}

void multiply(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    const double sg[2] = {-1.0, 1.0};
    const float64x2_t sign = vld1q_f64(sg);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t va = load1(a + i), vb = load1(b + i);
        const float64x2_t br = vdupq_laneq_f64(vb, 0);
        const float64x2_t bi = vdupq_laneq_f64(vb, 1);
        // [ar*br, ai*br] + [-ai*bi, ar*bi]
        store1(out + i, vfmaq_f64(vmulq_f64(va, br), vmulq_f64(swap_re_im(va), bi), sign));
    }
}

void multiply_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    const double sg[2] = {1.0, -1.0};
    const float64x2_t sign = vld1q_f64(sg);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t va = load1(a + i), vb = load1(b + i);
        const float64x2_t br = vdupq_laneq_f64(vb, 0);
        const float64x2_t bi = vdupq_laneq_f64(vb, 1);
        // [ar*br, ai*br] + [ai*bi, -ar*bi]
        store1(out + i, vfmaq_f64(vmulq_f64(va, br), vmulq_f64(swap_re_im(va), bi), sign));
    }
}

double norm_sq(const cplx* a, std::size_t n)
{
    float64x2_t s = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = load1(a + i);
        s = vfmaq_f64(s, v, v);
    }
    return vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
}

} // namespace

const KernelTable& table()
{
    static const KernelTable t{Isa::neon, dot_conj, axpy, multiply, multiply_conj, norm_sq};
    return t;
}

} // namespace gaborfio::kernels::neon
