#pragma once

// Data-parallel inner loops used by the signal chain. Every kernel has a
// scalar reference implementation; wider variants are selected at runtime
// and must agree with the reference to rounding error.

#include <cstddef>
#include <string_view>

#include "ofdmisac/common.hpp"

namespace ofdmisac::kernels {

struct KernelTable {
    std::string_view name;

    // out[i] = a[i] * b[i]
    void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = a[i] * conj(b[i])
    void (*cmul_conj)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = a[i] / b[i]
    void (*cdiv)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // y[i] += alpha * x[i]
    void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
    // sum_i |x[i]|^2
    double (*sum_norm)(const cplx* x, std::size_t n);
    // out[i] = scale * |x[i]|^2
    void (*norm_scaled)(const cplx* x, double scale, double* out, std::size_t n);
    // y[i] += sum_{p<nh} h[p] * x[i + nh - 1 - p],  i < ny; x holds ny + nh - 1 samples
    void (*fir_valid)(const cplx* x, const cplx* h, std::size_t nh, cplx* y, std::size_t ny);
};

const KernelTable& scalar();

/// AVX2/FMA variant, or nullptr when the CPU (or build) lacks it.
const KernelTable* avx2();

/// Best table for this CPU. Honors OFDMISAC_FORCE_SCALAR=1 in the environment.
const KernelTable& active();

}  // namespace ofdmisac::kernels
