#include "ofdmisac/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ofdmisac/fft.hpp"
#include "ofdmisac/kernels.hpp"

namespace ofdmisac {

SymbolMatrix extract_symbols(const ComplexFrame& frame, const DerivedParams& dp, int window_shift) {
    const int n = dp.num_subcarriers;
    const int m_count = dp.num_symbols;
    SymbolMatrix sym{CMatrix(n, m_count), window_shift, 0};
    std::int64_t missing = 0;
    for (int m = 0; m < m_count; ++m) {
        const std::int64_t first = static_cast<std::int64_t>(m) * dp.symbol_taps +
                                   static_cast<std::int64_t>(window_shift) * dp.cp_taps;
        const std::int64_t lo = std::max(first, frame.start_index);
        const std::int64_t hi = std::min(first + n, frame.end_index());
        auto col = sym.columns.col(m);
        if (hi > lo) {
            std::copy_n(frame.samples.begin() + (lo - frame.start_index), hi - lo,
                        col.begin() + (lo - first));
        }
        missing += n - std::max<std::int64_t>(0, hi - lo);
    }
    if (missing * 10 > static_cast<std::int64_t>(n) * m_count) {
        throw OutOfRange("window " + std::to_string(window_shift) + " exceeds the frame (" +
                         std::to_string(missing) + " taps missing)");
    }
    sym.missing_taps = static_cast<int>(missing);
    return sym;
}

CMatrix demodulate(const SymbolMatrix& sym) {
    CMatrix out(sym.columns.rows(), sym.columns.cols());
    fft::forward_batch(sym.columns.data().data(), out.data().data(),
                       static_cast<std::size_t>(sym.columns.rows()),
                       static_cast<std::size_t>(sym.columns.cols()));
    return out;
}

CMatrix remove_data(const CMatrix& demodulated, const DataGrid& grid, RemovalMode mode) {
    if (demodulated.rows() != grid.symbols.rows() || demodulated.cols() != grid.symbols.cols()) {
        throw DimensionMismatch("remove_data: grid does not match demodulated symbols");
    }
    const auto& k = kernels::active();
    CMatrix out(demodulated.rows(), demodulated.cols());
    const std::size_t count = demodulated.data().size();
    if (mode == RemovalMode::Divide) {
        k.cdiv(demodulated.data().data(), grid.symbols.data().data(), out.data().data(), count);
    } else {
        k.cmul_conj(demodulated.data().data(), grid.symbols.data().data(), out.data().data(), count);
    }
    return out;
}

CMatrix range_profiles(const CMatrix& data_removed) {
    CMatrix out(data_removed.rows(), data_removed.cols());
    fft::inverse_scaled_batch(data_removed.data().data(), out.data().data(),
                              static_cast<std::size_t>(data_removed.rows()),
                              static_cast<std::size_t>(data_removed.cols()));
    return out;
}

std::vector<cplx> range_profile(std::span<const cplx> data_removed_column) {
    std::vector<cplx> out(data_removed_column.size());
    fft::inverse_scaled(data_removed_column, out);
    return out;
}

RangeDopplerMap range_doppler(const CMatrix& profiles, int first_symbol) {
    const int n = profiles.rows();
    const int used = profiles.cols() - first_symbol;
    if (first_symbol < 0 || used < 1) throw InvalidParams("range_doppler: no symbols to combine");
    std::vector<cplx> spectrum(static_cast<std::size_t>(n) * used);
    fft::forward_strided(profiles.data().data() + static_cast<std::size_t>(first_symbol) * n,
                         spectrum.data(), static_cast<std::size_t>(used),
                         static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    RangeDopplerMap map(n, used);
    kernels::active().norm_scaled(spectrum.data(), 1.0 / used, map.power().data(), spectrum.size());
    return map;
}

std::vector<Detection> find_peaks(const RangeDopplerMap& map, double threshold_w, int range_limit) {
    const int n = map.range_bins();
    const int m = map.doppler_bins();
    range_limit = std::min(range_limit, n);

    struct Candidate {
        int p, q;
        double power;
    };
    std::vector<Candidate> candidates;
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < range_limit; ++p) {
            const double v = map.at(p, q);
            if (!(v > threshold_w)) continue;
            bool is_max = true;
            for (int dq = -1; dq <= 1 && is_max; ++dq) {
                for (int dp = -1; dp <= 1; ++dp) {
                    const int pp = (p + dp + n) % n;
                    const int qq = (q + dq + m) % m;
                    if (pp == p && qq == q) continue;
                    if (!(v > map.at(pp, qq))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) candidates.push_back({p, q, v});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.power != b.power) return a.power > b.power;
        if (a.p != b.p) return a.p < b.p;
        return a.q < b.q;
    });

    auto circular_distance = [](int a, int b, int size) {
        const int d = std::abs(a - b) % size;
        return std::min(d, size - d);
    };
    std::vector<Detection> accepted;
    for (const auto& c : candidates) {
        const bool excluded = std::any_of(accepted.begin(), accepted.end(), [&](const Detection& d) {
            return circular_distance(c.p, d.range_bin, n) <= 2 &&
                   circular_distance(c.q, d.doppler_bin, m) <= 1;
        });
        if (excluded) continue;
        Detection det;
        det.range_bin = c.p;
        det.doppler_bin = c.q;
        det.power_w = c.power;
        accepted.push_back(det);
    }
    return accepted;
}

Detection to_detection(int range_bin, int doppler_bin, double power_w, int window_shift,
                       const DerivedParams& dp, const SystemParams& params) {
    Detection det;
    det.range_bin = range_bin;
    det.doppler_bin = doppler_bin;
    det.power_w = power_w;
    det.window_index = window_shift;
    const int absolute = range_bin + window_shift * dp.cp_taps;
    det.distance_m = absolute * kSpeedOfLight / (2.0 * dp.bandwidth_hz);
    det.velocity_mps = bin_to_velocity(signed_doppler_bin(doppler_bin, dp.num_symbols), dp,
                                       params.carrier_frequency_hz);
    return det;
}

WindowResult process_window(const ComplexFrame& rx, const DataGrid& grid, const DerivedParams& dp,
                            int window_shift, const ReceiverOptions& options) {
    const SymbolMatrix sym = extract_symbols(rx, dp, window_shift);
    const CMatrix demod = demodulate(sym);
    const CMatrix removed = remove_data(demod, grid, options.removal);
    WindowResult result;
    result.profiles = range_profiles(removed);
    result.map = range_doppler(result.profiles, options.discard_first_symbol ? 1 : 0);
    return result;
}

}  // namespace ofdmisac
