#include "ofdmisac/kernels.hpp"

// std::complex is layout-compatible with double[2]; the loops below work on
// the interleaved representation so the compiler never emits the Annex-G
// NaN-recovery path of operator*.

namespace ofdmisac::kernels {
namespace {

void cmul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        po[2 * i] = ar * br - ai * bi;
        po[2 * i + 1] = ar * bi + ai * br;
    }
}

void cmul_conj_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        po[2 * i] = ar * br + ai * bi;
        po[2 * i + 1] = ai * br - ar * bi;
    }
}

void cdiv_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        const double inv = 1.0 / (br * br + bi * bi);
        po[2 * i] = (ar * br + ai * bi) * inv;
        po[2 * i + 1] = (ai * br - ar * bi) * inv;
    }
}

void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double xr_a = alpha.real(), xi_a = alpha.imag();
    const auto* px = reinterpret_cast<const double*>(x);
    auto* py = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = px[2 * i], xi = px[2 * i + 1];
        py[2 * i] += xr_a * xr - xi_a * xi;
        py[2 * i + 1] += xr_a * xi + xi_a * xr;
    }
}

double sum_norm_scalar(const cplx* x, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) acc += px[i] * px[i];
    return acc;
}

void norm_scaled_scalar(const cplx* x, double scale, double* out, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = scale * (px[2 * i] * px[2 * i] + px[2 * i + 1] * px[2 * i + 1]);
    }
}

void fir_valid_scalar(const cplx* x, const cplx* h, std::size_t nh, cplx* y, std::size_t ny) {
    const auto* px = reinterpret_cast<const double*>(x);
    const auto* ph = reinterpret_cast<const double*>(h);
    auto* py = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < ny; ++i) {
        double re = 0.0, im = 0.0;
        for (std::size_t p = 0; p < nh; ++p) {
            const std::size_t k = i + nh - 1 - p;
            const double hr = ph[2 * p], hi = ph[2 * p + 1];
            const double xr = px[2 * k], xi = px[2 * k + 1];
            re += hr * xr - hi * xi;
            im += hr * xi + hi * xr;
        }
        py[2 * i] += re;
        py[2 * i + 1] += im;
    }
}

constexpr KernelTable kScalar{
    "scalar",       cmul_scalar,        cmul_conj_scalar, cdiv_scalar, caxpy_scalar,
    sum_norm_scalar, norm_scaled_scalar, fir_valid_scalar,
};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace ofdmisac::kernels
