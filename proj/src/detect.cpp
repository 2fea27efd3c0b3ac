#include "ofdmisac/detect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ofdmisac/kernels.hpp"

namespace ofdmisac {

DetectorConfig DetectorConfig::resolved(const DerivedParams& dp) const {
    DetectorConfig c = *this;
    const int n = dp.num_subcarriers;
    const int m_used = dp.num_symbols - (discard_first_symbol ? 1 : 0);
    if (c.d_max_m <= 0) c.d_max_m = dp.unambiguous_range_m;
    if (c.p_max < 0) c.p_max = static_cast<int>(std::ceil(0.75 * n));
    if (c.q_max < 0) c.q_max = static_cast<int>(std::ceil(0.75 * m_used));
    if (!(c.rho > 1)) throw InvalidParams("detector rho must exceed 1");
    if (c.n_lag < 0 || c.n_lag >= n - dp.cp_taps) throw InvalidParams("detector n_lag out of range");
    if (c.p_max >= n) throw InvalidParams("detector p_max must be below N");
    if (c.q_max >= m_used) throw InvalidParams("detector q_max leaves no Doppler bins for the noise floor");
    if (m_used < 1) throw InvalidParams("detector needs at least one symbol");
    // Up to one range bin past d_un is accepted and clamped (d_un itself is not round).
    const double bin_m = kSpeedOfLight / (2.0 * dp.bandwidth_hz);
    if (c.d_max_m > dp.unambiguous_range_m + bin_m) {
        throw InvalidParams("detector d_max beyond the unambiguous range");
    }
    c.d_max_m = std::min(c.d_max_m, dp.unambiguous_range_m);
    return c;
}

int max_window_index(double d_max_m, const DerivedParams& dp) {
    if (dp.cp_taps == 0) return 0;
    const double v = std::floor(2.0 * d_max_m / (kSpeedOfLight * dp.cp_duration_s) - 1.0);
    return std::max(0, static_cast<int>(v));
}

double noise_floor(const RangeDopplerMap& map, int p_max, int q_max) {
    if (p_max < 0 || q_max < 0 || p_max >= map.range_bins() || q_max >= map.doppler_bins()) {
        throw InvalidParams("noise_floor: empty estimation region");
    }
    double sum = 0;
    for (int q = q_max; q < map.doppler_bins(); ++q) {
        for (int p = p_max; p < map.range_bins(); ++p) sum += map.at(p, q);
    }
    return sum / (static_cast<double>(map.range_bins() - p_max) * (map.doppler_bins() - q_max));
}

std::vector<Detection> detect_window(const RangeDopplerMap& map, double noise_floor_w, double rho, int range_limit) {
    auto peaks = find_peaks(map, rho * noise_floor_w, range_limit);
    std::sort(peaks.begin(), peaks.end(), [](const Detection& a, const Detection& b) {
        return a.range_bin != b.range_bin ? a.range_bin < b.range_bin : a.doppler_bin < b.doppler_bin;
    });
    return peaks;
}

std::vector<FirResponse> fir_estimate(const CMatrix& profiles, int n_cp, int n_lag, int source_window) {
    const int n = profiles.rows();
    if (n_lag < 0 || n_cp < 0 || n_lag >= n - n_cp) throw InvalidParams("fir_estimate: need n_lag < N - N_cp");
    const int len = n_cp + n_lag;
    std::vector<FirResponse> out(profiles.cols());
    for (int m = 0; m < profiles.cols(); ++m) {
        auto& f = out[m];
        f.lag = n_lag;
        f.source_window = source_window;
        f.taps.resize(len);
        const auto col = profiles.col(m);
        for (int p = 0; p < len; ++p) {
            const double sign = (p % 2 == 0) ? 1.0 : -1.0;
            f.taps[p] = col[((p - n_lag) % n + n) % n] * (sign / n);
        }
    }
    return out;
}

void gate_filters(std::vector<FirResponse>& filters, const std::vector<int>& range_bins, int half_width) {
    for (auto& f : filters) {
        for (int p = 0; p < static_cast<int>(f.taps.size()); ++p) {
            const int bin = p - f.lag;
            const bool keep = std::any_of(range_bins.begin(), range_bins.end(),
                                          [&](int b) { return std::abs(bin - b) <= half_width; });
            if (!keep) f.taps[p] = cplx{};
        }
    }
}

FirResponse average_filters(const std::vector<FirResponse>& filters, int first_symbol) {
    if (first_symbol < 0 || first_symbol >= static_cast<int>(filters.size())) {
        throw InvalidParams("average_filters: no filters to average");
    }
    FirResponse avg = filters[first_symbol];
    const double count = static_cast<double>(filters.size() - first_symbol);
    for (std::size_t m = first_symbol + 1; m < filters.size(); ++m) {
        if (filters[m].taps.size() != avg.taps.size()) throw DimensionMismatch("average_filters: length mismatch");
        for (std::size_t p = 0; p < avg.taps.size(); ++p) avg.taps[p] += filters[m].taps[p];
    }
    for (auto& t : avg.taps) t /= count;
    return avg;
}

void reconstruct_and_cancel(ComplexFrame& rx, const ComplexFrame& reference, const std::vector<FirResponse>& filters,
                            const DerivedParams& dp) {
    if (filters.empty()) return;
    const int m_count = dp.num_symbols;
    if (filters.size() != 1 && static_cast<int>(filters.size()) != m_count) {
        throw DimensionMismatch("reconstruct_and_cancel: need one filter or one per symbol");
    }
    const int len = static_cast<int>(filters.front().taps.size());
    const int lag = filters.front().lag;
    const int window = filters.front().source_window;
    if (len != dp.cp_taps + lag) throw DimensionMismatch("reconstruct_and_cancel: filter length is not N_cp + N_lag");

    const auto& k = kernels::active();
    const std::int64_t first_delay = static_cast<std::int64_t>(window) * dp.cp_taps - lag;
    const int ns = dp.symbol_taps;
    const int ny = ns + len - 1;
    std::vector<cplx> padded(static_cast<std::size_t>(ns) + 2 * (len - 1));
    std::vector<cplx> echo(ny);
    std::vector<cplx> g(len);

    for (int m = 0; m < m_count; ++m) {
        const auto& f = filters.size() == 1 ? filters.front() : filters[m];
        if (static_cast<int>(f.taps.size()) != len) throw DimensionMismatch("reconstruct_and_cancel: ragged filters");
        // Undo the half-band shift: g[p] is the tap at delay first_delay + p.
        for (int p = 0; p < len; ++p) g[p] = (p % 2 == 0) ? f.taps[p] : -f.taps[p];

        const std::int64_t src_start = static_cast<std::int64_t>(m) * ns - dp.cp_taps;
        std::fill(padded.begin(), padded.end(), cplx{});
        for (int i = 0; i < ns; ++i) padded[len - 1 + i] = reference.at(src_start + i);
        std::fill(echo.begin(), echo.end(), cplx{});
        k.fir_valid(padded.data(), g.data(), static_cast<std::size_t>(len), echo.data(), static_cast<std::size_t>(ny));

        const std::int64_t out_start = src_start + first_delay;
        const std::int64_t lo = std::max(out_start, rx.start_index);
        const std::int64_t hi = std::min(out_start + ny, rx.end_index());
        if (hi <= lo) continue;
        k.caxpy(cplx{-1.0, 0.0}, echo.data() + (lo - out_start), rx.samples.data() + (lo - rx.start_index),
                static_cast<std::size_t>(hi - lo));
    }
}

namespace {

double window_power(const ComplexFrame& frame, const DerivedParams& dp, int v) {
    const auto& k = kernels::active();
    double sum = 0;
    std::int64_t count = 0;
    for (int m = 0; m < dp.num_symbols; ++m) {
        const std::int64_t first = static_cast<std::int64_t>(m) * dp.symbol_taps +
                                   static_cast<std::int64_t>(v) * dp.cp_taps;
        const std::int64_t lo = std::max(first, frame.start_index);
        const std::int64_t hi = std::min(first + dp.num_subcarriers, frame.end_index());
        if (hi <= lo) continue;
        sum += k.sum_norm(frame.samples.data() + (lo - frame.start_index), static_cast<std::size_t>(hi - lo));
        count += hi - lo;
    }
    return count ? sum / static_cast<double>(count) : 0;
}

}  // namespace

SlidingResult sliding_window_detect(const ComplexFrame& rx, const DataGrid& grid, const SystemParams& params,
                                    const DerivedParams& dp, const DetectorConfig& config, bool keep_maps) {
    const DetectorConfig cfg = config.resolved(dp);
    const int v_max = max_window_index(cfg.d_max_m, dp);
    const int first_symbol = cfg.discard_first_symbol ? 1 : 0;
    const ReceiverOptions options{cfg.removal, cfg.discard_first_symbol};
    const ComplexFrame reference = reference_frame(grid, dp);
    ComplexFrame work = rx;

    SlidingResult result;
    for (int v = 0; v <= v_max; ++v) {
        WindowResult wr = process_window(work, grid, dp, v, options);
        WindowTrace trace;
        trace.window = v;
        trace.noise_floor_w = noise_floor(wr.map, cfg.p_max, cfg.q_max);
        const int range_limit = dp.cp_taps > 0 ? dp.cp_taps : dp.num_subcarriers;
        for (const auto& peak : detect_window(wr.map, trace.noise_floor_w, cfg.rho, range_limit)) {
            trace.detections.push_back(to_detection(peak.range_bin, peak.doppler_bin, peak.power_w, v, dp, params));
        }
        result.detections.insert(result.detections.end(), trace.detections.begin(), trace.detections.end());

        if (v < v_max && !trace.detections.empty()) {
            auto filters = fir_estimate(wr.profiles, dp.cp_taps, cfg.n_lag, v);
            if (cfg.gate_taps) {
                std::vector<int> bins;
                for (const auto& d : trace.detections) bins.push_back(d.range_bin);
                gate_filters(filters, bins, cfg.n_lag);
            }
            const auto strongest = std::max_element(
                trace.detections.begin(), trace.detections.end(),
                [](const Detection& a, const Detection& b) { return a.power_w < b.power_w; });
            trace.averaged_filter = strongest->doppler_bin == 0;
            if (trace.averaged_filter) filters = {average_filters(filters, first_symbol)};
            trace.pre_cancel_power_w = window_power(work, dp, v);
            reconstruct_and_cancel(work, reference, filters, dp);
            trace.post_cancel_power_w = window_power(work, dp, v);
            trace.cancelled = true;
            if (trace.post_cancel_power_w > trace.pre_cancel_power_w * db_to_linear(3.0)) {
                throw CancelDivergence("cancellation in window " + std::to_string(v) + " raised power by " +
                                       std::to_string(linear_to_db(trace.post_cancel_power_w /
                                                                   trace.pre_cancel_power_w)) +
                                       " dB");
            }
        }
        if (!keep_maps) trace.map = RangeDopplerMap();
        else trace.map = std::move(wr.map);
        result.windows.push_back(std::move(trace));
    }
    return result;
}

}  // namespace ofdmisac
