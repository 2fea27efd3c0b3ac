#pragma once

#include <cstddef>
#include <span>

#include "ofdmisac/common.hpp"

namespace ofdmisac::fft {

// Transform conventions used throughout the project:
//   forward        X[k] = sum_n x[n] e^{-j2pi nk/N}             (unscaled)
//   inverse        x[n] = sum_k X[k] e^{+j2pi nk/N}             (unscaled)
//   inverse_scaled x[n] = (1/N) sum_k X[k] e^{+j2pi nk/N}
// Batched variants transform `count` contiguous length-n columns.
// Strided variants transform `count` sequences of length n whose elements are
// `stride` apart and whose starts are consecutive (the rows of a column-major matrix).
// In-place calls (in == out) are allowed.

void forward(std::span<const cplx> in, std::span<cplx> out);
void inverse(std::span<const cplx> in, std::span<cplx> out);
void inverse_scaled(std::span<const cplx> in, std::span<cplx> out);

void forward_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count);
void inverse_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count);
void inverse_scaled_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count);

void forward_strided(const cplx* in, cplx* out, std::size_t n, std::size_t stride, std::size_t count);

}  // namespace ofdmisac::fft
