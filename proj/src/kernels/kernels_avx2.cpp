#include <immintrin.h>

#include "ofdmisac/kernels.hpp"

// Two interleaved complex doubles per __m256d: [re0, im0, re1, im1].
// Built with -mavx2 -mfma; only reached after the dispatcher has checked the CPU.

namespace ofdmisac::kernels {
namespace {

inline __m256d mul(__m256d a, __m256d b) {
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0xF);
    const __m256d as = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

inline __m256d mul_conj(__m256d a, __m256d b) {
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0xF);
    const __m256d as = _mm256_permute_pd(a, 0x5);
    return _mm256_fmsubadd_pd(a, br, _mm256_mul_pd(as, bi));
}

// alpha * x with alpha pre-split into broadcast real/imag parts.
inline __m256d scale(__m256d x, __m256d ar, __m256d ai) {
    const __m256d xs = _mm256_permute_pd(x, 0x5);
    return _mm256_fmaddsub_pd(x, ar, _mm256_mul_pd(xs, ai));
}

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(po + 2 * i, mul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
    }
    if (i < n) scalar().cmul(a + i, b + i, out + i, n - i);
}

void cmul_conj_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(po + 2 * i,
                         mul_conj(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
    }
    if (i < n) scalar().cmul_conj(a + i, b + i, out + i, n - i);
}

void cdiv_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d sq = _mm256_mul_pd(vb, vb);
        const __m256d mag = _mm256_hadd_pd(sq, sq);
        _mm256_storeu_pd(po + 2 * i, _mm256_div_pd(mul_conj(va, vb), mag));
    }
    if (i < n) scalar().cdiv(a + i, b + i, out + i, n - i);
}

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    auto* py = reinterpret_cast<double*>(y);
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vy = _mm256_loadu_pd(py + 2 * i);
        _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, scale(_mm256_loadu_pd(px + 2 * i), ar, ai)));
    }
    if (i < n) scalar().caxpy(alpha, x + i, y + i, n - i);
}

double sum_norm_avx2(const cplx* x, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(px + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(px + 2 * i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    if (i < n) acc += scalar().sum_norm(x + i, n - i);
    return acc;
}

void norm_scaled_avx2(const cplx* x, double s, double* out, std::size_t n) {
    const auto* px = reinterpret_cast<const double*>(x);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(px + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(px + 2 * i + 4);
        // hadd interleaves the 128-bit lanes: [n0, n2, n1, n3]
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
        const __m256d ordered = _mm256_permute4x64_pd(h, 0xD8);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(ordered, vs));
    }
    if (i < n) scalar().norm_scaled(x + i, s, out + i, n - i);
}

void fir_valid_avx2(const cplx* x, const cplx* h, std::size_t nh, cplx* y, std::size_t ny) {
    const auto* px = reinterpret_cast<const double*>(x);
    auto* py = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    // 8 outputs per block held in four accumulators across the whole tap loop.
    for (; i + 8 <= ny; i += 8) {
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        for (std::size_t p = 0; p < nh; ++p) {
            const __m256d hr = _mm256_set1_pd(h[p].real());
            const __m256d hi = _mm256_set1_pd(h[p].imag());
            const double* src = px + 2 * (i + nh - 1 - p);
            a0 = _mm256_add_pd(a0, scale(_mm256_loadu_pd(src), hr, hi));
            a1 = _mm256_add_pd(a1, scale(_mm256_loadu_pd(src + 4), hr, hi));
            a2 = _mm256_add_pd(a2, scale(_mm256_loadu_pd(src + 8), hr, hi));
            a3 = _mm256_add_pd(a3, scale(_mm256_loadu_pd(src + 12), hr, hi));
        }
        double* dst = py + 2 * i;
        _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), a0));
        _mm256_storeu_pd(dst + 4, _mm256_add_pd(_mm256_loadu_pd(dst + 4), a1));
        _mm256_storeu_pd(dst + 8, _mm256_add_pd(_mm256_loadu_pd(dst + 8), a2));
        _mm256_storeu_pd(dst + 12, _mm256_add_pd(_mm256_loadu_pd(dst + 12), a3));
    }
    if (i < ny) scalar().fir_valid(x + i, h, nh, y + i, ny - i);
}

constexpr KernelTable kAvx2{
    "avx2",       cmul_avx2,        cmul_conj_avx2, cdiv_avx2, caxpy_avx2,
    sum_norm_avx2, norm_scaled_avx2, fir_valid_avx2,
};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace ofdmisac::kernels
