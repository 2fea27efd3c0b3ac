#pragma once

#include <vector>

#include "ofdmisac/common.hpp"
#include "ofdmisac/params.hpp"
#include "ofdmisac/receiver.hpp"
#include "ofdmisac/waveform.hpp"

namespace ofdmisac {

struct DetectorConfig {
    double rho = 10.0;
    double d_max_m = 0;     // 0: unambiguous range
    int n_lag = 16;
    int p_max = -1;         // -1: ceil(0.75 N)
    int q_max = -1;         // -1: ceil(0.75 M'), M' = symbols combined in the map
    bool discard_first_symbol = false;
    RemovalMode removal = RemovalMode::Divide;
    /// Keep only filter taps within +-n_lag bins of a detection; false uses every tap.
    bool gate_taps = true;

    /// Copy with defaults filled in for `dp`; d_max is clamped to d_un. Throws InvalidParams on bad values.
    DetectorConfig resolved(const DerivedParams& dp) const;
};

/// h[p] = (1/N) R_m[(p - N_lag) mod N] e^{j pi p}, p = 0 ... N_cp + N_lag - 1.
struct FirResponse {
    std::vector<cplx> taps;
    int lag = 0;
    int source_window = 0;
};

/// floor(2 d_max / (c T_cp) - 1), never negative; 0 without a CP.
int max_window_index(double d_max_m, const DerivedParams& dp);

/// Mean of map power over p in [p_max, N), q in [q_max, M').
double noise_floor(const RangeDopplerMap& map, int p_max, int q_max);

/// Peaks with power > rho * P_N and range bin < range_limit, sorted by range bin.
std::vector<Detection> detect_window(const RangeDopplerMap& map, double noise_floor_w, double rho, int range_limit);

/// One filter per profile column.
std::vector<FirResponse> fir_estimate(const CMatrix& profiles, int n_cp, int n_lag, int source_window = 0);

/// Zeroes every tap farther than `half_width` bins from all of `range_bins`
/// (bins are window-relative, tap p sits at bin p - lag).
void gate_filters(std::vector<FirResponse>& filters, const std::vector<int>& range_bins, int half_width);

/// Mean of the per-symbol filters taken over columns [first_symbol, end).
FirResponse average_filters(const std::vector<FirResponse>& filters, int first_symbol = 0);

/// Subtracts the reconstructed in-window echoes from `rx` in place. Echo taps of
/// window v span absolute delays v N_cp - N_lag ... v N_cp + N_cp - 1. `filters` holds
/// either one response per symbol (selected by the source symbol of each reference
/// tap) or a single response applied to every symbol. `reference` is the unit-amplitude
/// transmit frame.
void reconstruct_and_cancel(ComplexFrame& rx, const ComplexFrame& reference, const std::vector<FirResponse>& filters,
                            const DerivedParams& dp);

struct WindowTrace {
    int window = 0;
    RangeDopplerMap map;
    double noise_floor_w = 0;
    std::vector<Detection> detections;
    bool cancelled = false;
    bool averaged_filter = false;
    double pre_cancel_power_w = 0;   // mean |y|^2 over the window's taps
    double post_cancel_power_w = 0;
};

struct SlidingResult {
    std::vector<Detection> detections;
    std::vector<WindowTrace> windows;
};

/// Window-by-window detection with successive cancellation. `rx` is not modified.
/// Throws CancelDivergence if a cancellation raises the window's power by more than 3 dB.
SlidingResult sliding_window_detect(const ComplexFrame& rx, const DataGrid& grid, const SystemParams& params,
                                    const DerivedParams& dp, const DetectorConfig& cfg, bool keep_maps = false);

}  // namespace ofdmisac
