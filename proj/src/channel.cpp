#include "ofdmisac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ofdmisac/kernels.hpp"
#include "ofdmisac/rng.hpp"

namespace ofdmisac {

double path_gain(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    if (!(distance_m > 0.0)) throw InvalidParams("path_gain: distance must be > 0");
    if (!(rcs_m2 > 0.0)) throw InvalidParams("path_gain: rcs must be > 0");
    const double four_pi_cubed = std::pow(4.0 * kPi, 3);
    const double d2 = distance_m * distance_m;
    return rcs_m2 * dp.wavelength_m * dp.wavelength_m / (four_pi_cubed * d2 * d2) *
           db_to_linear(params.tx_gain_db) * db_to_linear(params.rx_gain_db) * params.tx_power_w;
}

Scene scene_from_targets(const std::vector<Target>& targets, const SystemParams& params,
                         const DerivedParams& dp, std::uint64_t seed) {
    if (targets.empty()) throw InvalidParams("scene_from_targets: no targets");
    Scene scene;
    scene.targets = targets;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const Target& t = targets[i];
        if (!(t.distance_m >= 0.0)) throw InvalidParams("target distance must be >= 0");
        Path path;
        path.received_power_w = path_gain(t.distance_m, t.rcs_m2, params, dp);
        const auto bin = range_to_bin(t.distance_m, dp);
        path.delay_s = bin.delay_s;
        path.delay_taps = bin.tap;
        path.doppler_hz = 2.0 * t.velocity_mps * params.carrier_frequency_hz / kSpeedOfLight;
        auto engine = make_engine(seed, Stream::PathPhase, i);
        const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(engine);
        path.gain = std::polar(std::sqrt(path.received_power_w / params.tx_power_w), phase);
        path.target_index = static_cast<int>(i);
        scene.paths.push_back(path);
    }
    std::stable_sort(scene.paths.begin(), scene.paths.end(),
                     [](const Path& a, const Path& b) { return a.delay_s < b.delay_s; });
    return scene;
}

ComplexFrame apply_channel(const ComplexFrame& frame, const Scene& scene, const DerivedParams& dp,
                           DopplerMode mode, int extra_taps) {
    const auto& k = kernels::active();
    if (extra_taps < 0) extra_taps = dp.num_subcarriers;
    const std::int64_t in_len = static_cast<std::int64_t>(frame.samples.size());
    const std::int64_t out_len = in_len + extra_taps;
    const std::int64_t frame_taps = static_cast<std::int64_t>(dp.num_symbols) * dp.symbol_taps;

    ComplexFrame out;
    out.start_index = frame.start_index;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.assign(static_cast<std::size_t>(out_len), cplx{});

    for (const Path& path : scene.paths) {
        const std::int64_t delay = path.delay_taps;
        if (delay < 0 || delay >= frame_taps) {
            throw InvalidParams("path delay of " + std::to_string(delay) +
                                " taps exceeds the frame duration");
        }
        const std::int64_t n_copy = std::min(in_len, out_len - delay);
        if (n_copy <= 0) continue;
        if (mode == DopplerMode::PerSymbol) {
            // Source symbol m occupies buffer indices [m N_s, (m+1) N_s) when the frame
            // starts at -N_cp; other origins fall back to the tap-to-symbol map.
            for (std::int64_t i = 0; i < n_copy;) {
                const std::int64_t tap = frame.start_index + i;
                const std::int64_t m = (tap + dp.cp_taps) >= 0
                                           ? (tap + dp.cp_taps) / dp.symbol_taps
                                           : -1 - (-(tap + dp.cp_taps) - 1) / dp.symbol_taps;
                const std::int64_t seg_end =
                    std::min(n_copy, (m + 1) * dp.symbol_taps - dp.cp_taps - frame.start_index);
                const cplx rot = path.gain * std::polar(1.0, 2.0 * kPi * path.doppler_hz *
                                                                 static_cast<double>(m) *
                                                                 dp.total_symbol_duration_s);
                k.caxpy(rot, frame.samples.data() + i, out.samples.data() + i + delay,
                        static_cast<std::size_t>(seg_end - i));
                i = seg_end;
            }
        } else {
            const double w = 2.0 * kPi * path.doppler_hz / dp.bandwidth_hz;
            for (std::int64_t i = 0; i < n_copy; ++i) {
                const double tap = static_cast<double>(frame.start_index + i);
                out.samples[static_cast<std::size_t>(i + delay)] +=
                    path.gain * std::polar(1.0, w * tap) * frame.samples[static_cast<std::size_t>(i)];
            }
        }
    }
    return out;
}

ComplexFrame add_noise(const ComplexFrame& frame, const DerivedParams& dp, std::uint64_t seed) {
    ComplexFrame out = frame;
    auto engine = make_engine(seed, Stream::Noise);
    std::normal_distribution<double> gauss(0.0, std::sqrt(dp.noise_power_w / 2.0));
    for (auto& s : out.samples) {
        const double re = gauss(engine);
        const double im = gauss(engine);
        s += cplx{re, im};
    }
    return out;
}

}  // namespace ofdmisac
