#pragma once

#include <cstdint>
#include <vector>

#include "ofdmisac/channel.hpp"
#include "ofdmisac/common.hpp"
#include "ofdmisac/params.hpp"

namespace ofdmisac {

/// Unit-power split of a demodulated subcarrier when the path delay overruns the CP.
struct InterferenceSplit {
    double p_useful = 1;   // (1 - x)^2
    double p_ici = 0;      // (1 - x) x
    double p_isi = 0;      // x
    double excess_taps = 0;  // (N_tau - N_cp)+
};

/// x = max(0, n_tau - n_cp) / n. Fractional delays are accepted.
InterferenceSplit interference_split(double n_tau, int n_cp, int n);

struct SinrReport {
    double snr_free = 0;        // gamma_1 = P_R / (N_0 df)
    double sinr = 0;            // linear
    double degradation_db = 0;  // 10 log10(M gamma_1 / sinr)
    double noise_term = 0;      // 1 / gamma_1
    double interference_term = 0;
};

/// Delay of a monostatic echo in (fractional) taps.
double delay_taps(double distance_m, const DerivedParams& dp);

double snr_free(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp);

/// gamma(d) = M (1-x)^2 / (1/gamma_1 + x(2-x)/N).
SinrReport sinr_single(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp);

/// gamma_1 M (1 - (tau - T_cp)+ / T)^2.
double sinr_upper(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp);

/// I_t = sum_l x_l (2 - x_l) P_R,l in watts.
double total_interference(const Scene& scene, const DerivedParams& dp);

/// Multi-target SINR at the probe; I_t enters normalized by the probe's received power.
/// Throws InvalidParams when no scene target lies at `probe_distance_m`.
SinrReport sinr_multi(double probe_distance_m, double rcs_m2, const Scene& scene, const SystemParams& params,
                      const DerivedParams& dp);

/// gamma_sw = M / (1/gamma_1 + (I_t / P_R) / N): window shifting removes the P_u loss.
SinrReport sinr_sliding(double distance_m, double rcs_m2, const Scene& scene, const SystemParams& params,
                        const DerivedParams& dp);

enum class RangeModel { Conventional, Sliding };

/// Largest d with SINR(d) >= rho, by bisection on [1 m, d_un]; capped at d_un.
/// The sliding model uses a lone target (its own I_t). Throws NoRange if SINR(1 m) <= rho.
double max_range(double rho, RangeModel model, double rcs_m2, const SystemParams& params, const DerivedParams& dp);

struct SampleStats {
    cplx mean;
    double variance = 0;     // E|z - mean|^2
    double kurtosis = 0;     // E|z|^4 / (E|z|^2)^2, 2 for circular Gaussian
    double circularity = 0;  // 1 - |E z^2| / E|z|^2, 1 for proper samples
};

struct InterferenceSamples {
    std::vector<cplx> ici;   // I_c'[i] / N
    std::vector<cplx> isi;   // I_s'[i] / N
    SampleStats ici_stats;
    SampleStats isi_stats;
    InterferenceSplit split;
};

/// Evaluates the closed-form ICI and ISI terms after data removal for `trials` random
/// symbol pairs, normalized so their variances compare to P_ICI and P_ISI.
InterferenceSamples interference_samples(int n_tau, int n_cp, int n, int order, std::uint64_t seed, int trials);

SampleStats sample_stats(const std::vector<cplx>& z);

}  // namespace ofdmisac
