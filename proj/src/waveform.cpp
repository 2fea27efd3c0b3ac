#include "ofdmisac/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ofdmisac/fft.hpp"
#include "ofdmisac/rng.hpp"

namespace ofdmisac {
namespace {

int gray(int v) { return v ^ (v >> 1); }

// Amplitude levels of one PAM axis, indexed by Gray-coded bits.
std::vector<double> pam_levels(int levels) {
    std::vector<double> out(levels);
    for (int i = 0; i < levels; ++i) out[gray(i)] = 2.0 * i - (levels - 1);
    return out;
}

void check_dims(const DataGrid& grid, const DerivedParams& dp) {
    if (grid.symbols.rows() != dp.num_subcarriers || grid.symbols.cols() != dp.num_symbols) {
        throw DimensionMismatch("data grid is " + std::to_string(grid.symbols.rows()) + "x" +
                                std::to_string(grid.symbols.cols()) + ", expected " +
                                std::to_string(dp.num_subcarriers) + "x" + std::to_string(dp.num_symbols));
    }
}

ComplexFrame synthesize(const DataGrid& grid, const DerivedParams& dp, double amplitude) {
    check_dims(grid, dp);
    const int n = dp.num_subcarriers;
    const int ncp = dp.cp_taps;
    const int ns = dp.symbol_taps;
    const int m_count = dp.num_symbols;

    std::vector<cplx> bodies(grid.symbols.data().size());
    fft::inverse_batch(grid.symbols.data().data(), bodies.data(), n, m_count);

    ComplexFrame frame;
    frame.start_index = -ncp;
    frame.sample_rate_hz = dp.bandwidth_hz;
    frame.samples.resize(static_cast<std::size_t>(m_count) * ns);
    for (int m = 0; m < m_count; ++m) {
        const cplx* body = bodies.data() + static_cast<std::size_t>(m) * n;
        cplx* out = frame.samples.data() + static_cast<std::size_t>(m) * ns;
        for (int j = 0; j < ncp; ++j) out[j] = amplitude * body[n - ncp + j];
        for (int j = 0; j < n; ++j) out[ncp + j] = amplitude * body[j];
    }
    return frame;
}

}  // namespace

std::vector<cplx> constellation(int order) {
    switch (order) {
        case 2:
            return {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
        case 4:
        case 16:
        case 64: {
            const int side = static_cast<int>(std::lround(std::sqrt(order)));
            const int bits = side == 2 ? 1 : side == 4 ? 2 : 3;
            const auto levels = pam_levels(side);
            // Average power of the unscaled square grid: 2 (side^2 - 1) / 3.
            const double norm = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
            std::vector<cplx> points(order);
            for (int i = 0; i < order; ++i) {
                const int hi = i >> bits;
                const int lo = i & (side - 1);
                points[i] = norm * cplx{levels[hi], levels[lo]};
            }
            return points;
        }
        default:
            throw InvalidParams("unsupported modulation order " + std::to_string(order));
    }
}

DataGrid gen_data_grid(const DerivedParams& dp, int order, std::uint64_t seed) {
    const auto points = constellation(order);
    DataGrid grid{CMatrix(dp.num_subcarriers, dp.num_symbols), order, seed};
    for (int m = 0; m < dp.num_symbols; ++m) {
        auto engine = make_engine(seed, Stream::Data, static_cast<std::uint64_t>(m));
        std::uniform_int_distribution<int> pick(0, order - 1);
        for (auto& d : grid.symbols.col(m)) d = points[pick(engine)];
    }
    return grid;
}

ComplexFrame modulate(const DataGrid& grid, const SystemParams& params, const DerivedParams& dp) {
    return synthesize(grid, dp, std::sqrt(params.tx_power_w / dp.num_subcarriers));
}

ComplexFrame reference_frame(const DataGrid& grid, const DerivedParams& dp) {
    return synthesize(grid, dp, 1.0);
}

}  // namespace ofdmisac
