#pragma once

#include <cstdint>
#include <optional>

#include "ofdmisac/common.hpp"

namespace ofdmisac {

/// System configuration. The cyclic prefix is given either as a duration or as
/// a tap count, never both; taps are the canonical form once derived.
struct SystemParams {
    double carrier_frequency_hz = 24e9;
    double subcarrier_spacing_hz = 120e3;
    int num_subcarriers = 2048;
    int num_symbols = 14;
    std::optional<double> cp_duration_s;
    std::optional<int> cp_taps = 145;
    double tx_power_w = 0.1;
    double tx_gain_db = 20.0;
    double rx_gain_db = 20.0;
    double noise_figure_db = 2.9;
    double temperature_k = 290.0;
    int modulation_order = 16;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

struct DerivedParams {
    int num_subcarriers = 0;          // N
    int num_symbols = 0;              // M
    int cp_taps = 0;                  // N_cp
    int symbol_taps = 0;              // N_s = N + N_cp
    double bandwidth_hz = 0;          // B = N * df
    double subcarrier_spacing_hz = 0;
    double symbol_duration_s = 0;     // T = 1/df
    double cp_duration_s = 0;         // N_cp / B
    double total_symbol_duration_s = 0;
    double noise_psd_w_per_hz = 0;    // k_B * T_temp * NF
    double noise_power_w = 0;         // N_0 * B
    double isi_free_range_m = 0;      // c T_cp / 2
    double unambiguous_range_m = 0;   // (N-1) c / (2B)
    double spectral_efficiency = 0;   // T / (T + T_cp)
    double wavelength_m = 0;
    double carrier_frequency_hz = 0;
};

/// Pure: identical inputs give bit-identical outputs.
/// Throws NonIntegerCpTaps when a CP duration does not land on a tap within 1e-6 relative.
DerivedParams derive(const SystemParams& params);

struct DelayBin {
    double delay_s;
    int tap;
};

/// Round-trip delay and its tap index (rounded half-up).
DelayBin range_to_bin(double distance_m, const DerivedParams& dp);

double bin_to_range(int range_bin, const DerivedParams& dp);
/// `doppler_bin` is signed, in [-M/2, M/2).
double bin_to_velocity(int doppler_bin, const DerivedParams& dp, double carrier_frequency_hz);

/// Maps an unsigned FFT Doppler index in [0, M) onto [-M/2, M/2).
int signed_doppler_bin(int q, int num_symbols);

double spectral_efficiency(double symbol_duration_s, double cp_duration_s);

/// Copy of `params` with the CP set to the tap count nearest to `cp_duration_s`.
SystemParams with_quantized_cp(const SystemParams& params, double cp_duration_s);

}  // namespace ofdmisac
