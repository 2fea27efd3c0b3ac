#include "ofdmisac/params.hpp"

#include <cmath>
#include <string>

namespace ofdmisac {

void SystemParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidParams(std::string(name) + " must be strictly positive");
        }
    };
    positive(carrier_frequency_hz, "carrier_frequency");
    positive(subcarrier_spacing_hz, "subcarrier_spacing");
    positive(tx_power_w, "tx_power");
    positive(temperature_k, "temperature");
    if (num_subcarriers < 2) throw InvalidParams("num_subcarriers must be >= 2");
    if (num_symbols < 1) throw InvalidParams("num_symbols must be >= 1");
    if (modulation_order != 2 && modulation_order != 4 && modulation_order != 16 &&
        modulation_order != 64) {
        throw InvalidParams("modulation_order must be one of 2, 4, 16, 64");
    }
    if (cp_duration_s.has_value() == cp_taps.has_value()) {
        throw InvalidParams("exactly one of cp_duration and cp_taps must be given");
    }
    if (cp_duration_s && (*cp_duration_s < 0.0 || !std::isfinite(*cp_duration_s))) {
        throw InvalidParams("cp_duration must be >= 0");
    }
    if (cp_taps && (*cp_taps < 0 || *cp_taps >= num_subcarriers)) {
        throw InvalidParams("cp_taps must lie in [0, num_subcarriers)");
    }
    for (double db : {tx_gain_db, rx_gain_db, noise_figure_db}) {
        if (!std::isfinite(db)) throw InvalidParams("gains and noise figure must be finite");
    }
}

DerivedParams derive(const SystemParams& params) {
    params.validate();
    DerivedParams dp;
    dp.num_subcarriers = params.num_subcarriers;
    dp.num_symbols = params.num_symbols;
    dp.subcarrier_spacing_hz = params.subcarrier_spacing_hz;
    dp.bandwidth_hz = params.num_subcarriers * params.subcarrier_spacing_hz;
    dp.symbol_duration_s = 1.0 / params.subcarrier_spacing_hz;

    if (params.cp_taps) {
        dp.cp_taps = *params.cp_taps;
    } else {
        const double exact = *params.cp_duration_s * dp.bandwidth_hz;
        const double rounded = std::floor(exact + 0.5);
        if (std::abs(exact - rounded) > 1e-6 * exact) {
            throw NonIntegerCpTaps("cp_duration * bandwidth = " + std::to_string(exact) +
                                   " is not an integer tap count");
        }
        dp.cp_taps = static_cast<int>(rounded);
        if (dp.cp_taps >= dp.num_subcarriers) {
            throw InvalidParams("cp_taps must be smaller than num_subcarriers");
        }
    }
    dp.symbol_taps = dp.num_subcarriers + dp.cp_taps;
    dp.cp_duration_s = dp.cp_taps / dp.bandwidth_hz;
    dp.total_symbol_duration_s = dp.symbol_duration_s + dp.cp_duration_s;
    dp.noise_psd_w_per_hz =
        kBoltzmann * params.temperature_k * db_to_linear(params.noise_figure_db);
    dp.noise_power_w = dp.noise_psd_w_per_hz * dp.bandwidth_hz;
    dp.isi_free_range_m = kSpeedOfLight * dp.cp_duration_s / 2.0;
    dp.unambiguous_range_m = (dp.num_subcarriers - 1) * kSpeedOfLight / (2.0 * dp.bandwidth_hz);
    dp.spectral_efficiency = spectral_efficiency(dp.symbol_duration_s, dp.cp_duration_s);
    dp.wavelength_m = kSpeedOfLight / params.carrier_frequency_hz;
    dp.carrier_frequency_hz = params.carrier_frequency_hz;
    return dp;
}

DelayBin range_to_bin(double distance_m, const DerivedParams& dp) {
    if (!(distance_m >= 0.0)) throw OutOfRange("distance must be >= 0");
    const double delay = 2.0 * distance_m / kSpeedOfLight;
    return {delay, static_cast<int>(std::floor(delay * dp.bandwidth_hz + 0.5))};
}

double bin_to_range(int range_bin, const DerivedParams& dp) {
    if (range_bin < 0 || range_bin >= dp.num_subcarriers) {
        throw OutOfRange("range bin " + std::to_string(range_bin) + " outside [0, N)");
    }
    return range_bin * kSpeedOfLight / (2.0 * dp.bandwidth_hz);
}

double bin_to_velocity(int doppler_bin, const DerivedParams& dp, double carrier_frequency_hz) {
    const int m = dp.num_symbols;
    if (doppler_bin < -(m / 2) || doppler_bin >= m - m / 2) {
        throw OutOfRange("doppler bin " + std::to_string(doppler_bin) + " outside [-M/2, M/2)");
    }
    return doppler_bin * kSpeedOfLight /
           (2.0 * m * dp.total_symbol_duration_s * carrier_frequency_hz);
}

int signed_doppler_bin(int q, int num_symbols) {
    return 2 * q >= num_symbols ? q - num_symbols : q;
}

double spectral_efficiency(double symbol_duration_s, double cp_duration_s) {
    return symbol_duration_s / (symbol_duration_s + cp_duration_s);
}

SystemParams with_quantized_cp(const SystemParams& params, double cp_duration_s) {
    SystemParams out = params;
    const double bandwidth = params.num_subcarriers * params.subcarrier_spacing_hz;
    out.cp_duration_s.reset();
    out.cp_taps = static_cast<int>(std::floor(cp_duration_s * bandwidth + 0.5));
    return out;
}

}  // namespace ofdmisac
