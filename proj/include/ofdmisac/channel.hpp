#pragma once

#include <cstdint>
#include <vector>

#include "ofdmisac/common.hpp"
#include "ofdmisac/params.hpp"
#include "ofdmisac/waveform.hpp"

namespace ofdmisac {

struct Target {
    double distance_m = 0;
    double velocity_mps = 0;  // radial
    double rcs_m2 = 1;
};

struct Path {
    cplx gain;                // alpha_l, |alpha|^2 = P_R / P_T
    double delay_s = 0;
    int delay_taps = 0;
    double doppler_hz = 0;
    double received_power_w = 0;
    int target_index = 0;     // position in Scene::targets
};

/// Targets plus their propagation paths, sorted by ascending delay.
struct Scene {
    std::vector<Target> targets;
    std::vector<Path> paths;
};

enum class DopplerMode {
    PerSymbol,  // rotation held constant over each OFDM symbol
    PerSample,  // exact rotation e^{j2pi f_D t} on every sample
};

/// Monostatic radar equation: kappa lambda^2 / ((4pi)^3 d^4) G_T G_R P_T, in watts.
double path_gain(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp);

/// Path phases are uniform in [0, 2pi), drawn per target from `seed`.
Scene scene_from_targets(const std::vector<Target>& targets, const SystemParams& params,
                         const DerivedParams& dp, std::uint64_t seed);

/// Delayed, Doppler-rotated sum of path echoes. The output starts at the same tap as
/// `frame` and runs `extra_taps` past its end (default: one symbol body, N taps) so that
/// shifted detection windows stay covered. Nothing precedes the frame (cold start).
ComplexFrame apply_channel(const ComplexFrame& frame, const Scene& scene, const DerivedParams& dp,
                           DopplerMode mode = DopplerMode::PerSymbol, int extra_taps = -1);

/// Adds circular complex Gaussian noise of variance N_0 B per sample.
ComplexFrame add_noise(const ComplexFrame& frame, const DerivedParams& dp, std::uint64_t seed);

}  // namespace ofdmisac
