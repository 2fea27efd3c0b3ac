#pragma once

#include <span>
#include <vector>

#include "ofdmisac/common.hpp"
#include "ofdmisac/params.hpp"
#include "ofdmisac/waveform.hpp"

namespace ofdmisac {

/// Windowed symbols y_m[n]; column m is read from frame taps
/// m N_s + v N_cp ... m N_s + v N_cp + N - 1.
struct SymbolMatrix {
    CMatrix columns;
    int window_shift = 0;   // v, in units of N_cp taps
    int missing_taps = 0;   // taps outside the frame, zero-filled
};

enum class RemovalMode {
    Divide,     // F = Y / d
    Conjugate,  // F = Y conj(d)
};

/// R[p, q] in watts, stored column-major (Doppler bin q is the column).
class RangeDopplerMap {
public:
    RangeDopplerMap() = default;
    RangeDopplerMap(int range_bins, int doppler_bins)
        : range_bins_(range_bins), doppler_bins_(doppler_bins),
          power_(static_cast<std::size_t>(range_bins) * doppler_bins) {}

    int range_bins() const { return range_bins_; }
    int doppler_bins() const { return doppler_bins_; }
    double& at(int p, int q) { return power_[static_cast<std::size_t>(q) * range_bins_ + p]; }
    double at(int p, int q) const { return power_[static_cast<std::size_t>(q) * range_bins_ + p]; }
    std::vector<double>& power() { return power_; }
    const std::vector<double>& power() const { return power_; }

private:
    int range_bins_ = 0;
    int doppler_bins_ = 0;
    std::vector<double> power_;
};

struct Detection {
    int range_bin = 0;       // p-hat within the window
    int doppler_bin = 0;     // q-hat, unsigned FFT index
    double distance_m = 0;
    double velocity_mps = 0;
    double power_w = 0;
    int window_index = 0;    // v
};

/// Throws OutOfRange when more than 10% of the requested taps fall outside the frame.
SymbolMatrix extract_symbols(const ComplexFrame& frame, const DerivedParams& dp, int window_shift);

/// Y_m[i] = sum_n y_m[n] e^{-j2pi ni/N}, unscaled.
CMatrix demodulate(const SymbolMatrix& sym);

CMatrix remove_data(const CMatrix& demodulated, const DataGrid& grid, RemovalMode mode);

/// R_m[p] = (1/N) sum_i F_m[i] e^{j2pi ip/N}, one profile per column.
CMatrix range_profiles(const CMatrix& data_removed);
std::vector<cplx> range_profile(std::span<const cplx> data_removed_column);

/// R[p, q] = (1/M) |sum_m R_m[p] e^{-j2pi mq/M}|^2 over the columns
/// [first_symbol, profiles.cols()); M counts only the columns used.
RangeDopplerMap range_doppler(const CMatrix& profiles, int first_symbol = 0);

/// Strict local maxima (circular in both axes) above `threshold_w` with range bin
/// below `range_limit`, accepted in descending power (ties: lower range bin) with a
/// +-2 range x +-1 Doppler exclusion zone around each accepted peak.
/// Returned in acceptance order; entries carry only bins and power.
std::vector<Detection> find_peaks(const RangeDopplerMap& map, double threshold_w, int range_limit);

Detection to_detection(int range_bin, int doppler_bin, double power_w, int window_shift,
                       const DerivedParams& dp, const SystemParams& params);

struct ReceiverOptions {
    RemovalMode removal = RemovalMode::Divide;
    bool discard_first_symbol = false;
};

/// One pass of the conventional sensing chain on window `window_shift`.
struct WindowResult {
    CMatrix profiles;        // R_m[p]
    RangeDopplerMap map;
};

WindowResult process_window(const ComplexFrame& rx, const DataGrid& grid, const DerivedParams& dp,
                            int window_shift, const ReceiverOptions& options = {});

}  // namespace ofdmisac
