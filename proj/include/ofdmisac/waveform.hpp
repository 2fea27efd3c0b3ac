#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ofdmisac/common.hpp"
#include "ofdmisac/params.hpp"

namespace ofdmisac {

/// Column-major complex matrix; column c is contiguous. Used for N x M
/// subcarrier/symbol grids where each column is one OFDM symbol.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int r, int c) { return data_[index(r, c)]; }
    const cplx& operator()(int r, int c) const { return data_[index(r, c)]; }

    std::span<cplx> col(int c) { return {data_.data() + static_cast<std::size_t>(c) * rows_, static_cast<std::size_t>(rows_)}; }
    std::span<const cplx> col(int c) const { return {data_.data() + static_cast<std::size_t>(c) * rows_, static_cast<std::size_t>(rows_)}; }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

private:
    std::size_t index(int r, int c) const { return static_cast<std::size_t>(c) * rows_ + r; }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

/// d_km: N subcarriers x M symbols drawn from a unit-average-power constellation.
struct DataGrid {
    CMatrix symbols;
    int modulation_order = 0;
    std::uint64_t seed = 0;
};

/// Contiguous baseband samples. samples[0] sits at tap `start_index`, where tap 0
/// is the start of the first main (post-CP) symbol body.
struct ComplexFrame {
    std::vector<cplx> samples;
    std::int64_t start_index = 0;
    double sample_rate_hz = 0;

    std::int64_t end_index() const { return start_index + static_cast<std::int64_t>(samples.size()); }
    /// Sample at an absolute tap, zero outside the buffer.
    cplx at(std::int64_t tap) const {
        return tap >= start_index && tap < end_index() ? samples[static_cast<std::size_t>(tap - start_index)] : cplx{};
    }
};

/// Gray-mapped square constellation scaled to unit average power; index i carries bits of i.
std::vector<cplx> constellation(int order);

/// Deterministic under `seed`; each symbol column uses its own sub-stream.
DataGrid gen_data_grid(const DerivedParams& dp, int order, std::uint64_t seed);

/// CP-OFDM synthesis at rate B. Symbol m occupies taps m*N_s - N_cp ... m*N_s + N - 1 with
/// body x_m[n] = sqrt(P_T/N) sum_k d_km e^{j2pi kn/N}; the CP repeats the body's last N_cp taps.
ComplexFrame modulate(const DataGrid& grid, const SystemParams& params, const DerivedParams& dp);

/// Same synthesis with unit amplitude: the regenerated transmit samples used for
/// echo reconstruction during cancellation.
ComplexFrame reference_frame(const DataGrid& grid, const DerivedParams& dp);

}  // namespace ofdmisac
