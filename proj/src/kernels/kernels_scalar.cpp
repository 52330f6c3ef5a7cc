#include "gaborfio/kernels.hpp"

namespace gaborfio::kernels::scalar {
namespace {

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n)
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ai * br - ar * bi;
    }
    return {re, im};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n)
{
    const double p = alpha.real(), q = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + p * xr - q * xi, y[i].imag() + p * xi + q * xr};
    }
}

void multiply(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

void multiply_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br + ai * bi, ai * br - ar * bi};
    }
}

double norm_sq(const cplx* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

} // namespace

const KernelTable& table()
{
    static const KernelTable t{Isa::scalar, dot_conj, axpy, multiply, multiply_conj, norm_sq};
    return t;
}

} // namespace gaborfio::kernels::scalar
