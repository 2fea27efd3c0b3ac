#include "ofdmisac/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ofdmisac/rng.hpp"
#include "ofdmisac/waveform.hpp"

namespace ofdmisac {

InterferenceSplit interference_split(double n_tau, int n_cp, int n) {
    if (n <= 0 || n_cp < 0 || n_cp >= n || n_tau < 0) {
        throw InvalidParams("interference_split: need 0 <= n_cp < n and n_tau >= 0");
    }
    InterferenceSplit s;
    s.excess_taps = std::max(0.0, n_tau - n_cp);
    if (s.excess_taps == 0) return s;
    const double x = s.excess_taps / n;
    s.p_useful = (1 - x) * (1 - x);
    s.p_ici = (1 - x) * x;
    s.p_isi = x;
    return s;
}

double delay_taps(double distance_m, const DerivedParams& dp) {
    return 2.0 * distance_m / kSpeedOfLight * dp.bandwidth_hz;
}

double snr_free(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    return path_gain(distance_m, rcs_m2, params, dp) / (dp.noise_psd_w_per_hz * dp.subcarrier_spacing_hz);
}

namespace {

SinrReport make_report(double gamma1, double p_useful, double interference_term, const DerivedParams& dp) {
    SinrReport r;
    r.snr_free = gamma1;
    r.noise_term = 1.0 / gamma1;
    r.interference_term = interference_term;
    r.sinr = dp.num_symbols * p_useful / (r.noise_term + interference_term);
    r.degradation_db = linear_to_db(dp.num_symbols * gamma1 / r.sinr);
    return r;
}

double excess_fraction(double distance_m, const DerivedParams& dp) {
    return std::max(0.0, delay_taps(distance_m, dp) - dp.cp_taps) / dp.num_subcarriers;
}

}  // namespace

SinrReport sinr_single(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    const double gamma1 = snr_free(distance_m, rcs_m2, params, dp);
    const double x = excess_fraction(distance_m, dp);
    return make_report(gamma1, (1 - x) * (1 - x), x * (2 - x) / dp.num_subcarriers, dp);
}

double sinr_upper(double distance_m, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    const double tau = 2.0 * distance_m / kSpeedOfLight;
    const double f = 1.0 - std::max(0.0, tau - dp.cp_duration_s) / dp.symbol_duration_s;
    return snr_free(distance_m, rcs_m2, params, dp) * dp.num_symbols * f * f;
}

double total_interference(const Scene& scene, const DerivedParams& dp) {
    double total = 0;
    for (const auto& path : scene.paths) {
        const double x = std::max(0.0, path.delay_s * dp.bandwidth_hz - dp.cp_taps) / dp.num_subcarriers;
        total += x * (2 - x) * path.received_power_w;
    }
    return total;
}

SinrReport sinr_multi(double probe_distance_m, double rcs_m2, const Scene& scene, const SystemParams& params,
                      const DerivedParams& dp) {
    const bool present = std::any_of(scene.targets.begin(), scene.targets.end(), [&](const Target& t) {
        return std::abs(t.distance_m - probe_distance_m) <= 1e-9 * std::max(1.0, probe_distance_m);
    });
    if (!present) throw InvalidParams("sinr_multi: probe target is not part of the scene");
    const double p_r = path_gain(probe_distance_m, rcs_m2, params, dp);
    const double x = excess_fraction(probe_distance_m, dp);
    const double it = total_interference(scene, dp) / p_r;
    return make_report(snr_free(probe_distance_m, rcs_m2, params, dp), (1 - x) * (1 - x),
                       it / dp.num_subcarriers, dp);
}

SinrReport sinr_sliding(double distance_m, double rcs_m2, const Scene& scene, const SystemParams& params,
                        const DerivedParams& dp) {
    const double p_r = path_gain(distance_m, rcs_m2, params, dp);
    const double it = total_interference(scene, dp) / p_r;
    return make_report(snr_free(distance_m, rcs_m2, params, dp), 1.0, it / dp.num_subcarriers, dp);
}

namespace {

double model_sinr(double d, RangeModel model, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    if (model == RangeModel::Conventional) return sinr_single(d, rcs_m2, params, dp).sinr;
    const double x = excess_fraction(d, dp);
    const double gamma1 = snr_free(d, rcs_m2, params, dp);
    return make_report(gamma1, 1.0, x * (2 - x) / dp.num_subcarriers, dp).sinr;
}

}  // namespace

double max_range(double rho, RangeModel model, double rcs_m2, const SystemParams& params, const DerivedParams& dp) {
    if (!(rho > 0)) throw InvalidParams("max_range: rho must be positive");
    const double d_un = dp.unambiguous_range_m;
    double lo = 1.0;
    if (model_sinr(lo, model, rcs_m2, params, dp) <= rho) throw NoRange("SINR at 1 m is already below threshold");
    double hi = d_un;
    if (model_sinr(hi, model, rcs_m2, params, dp) >= rho) return d_un;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (model_sinr(mid, model, rcs_m2, params, dp) >= rho) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

SampleStats sample_stats(const std::vector<cplx>& z) {
    SampleStats s;
    if (z.empty()) return s;
    const double count = static_cast<double>(z.size());
    cplx sum{}, sum_sq{};
    double p2 = 0, p4 = 0;
    for (const auto& v : z) {
        sum += v;
        sum_sq += v * v;
        const double a = std::norm(v);
        p2 += a;
        p4 += a * a;
    }
    s.mean = sum / count;
    s.variance = p2 / count - std::norm(s.mean);
    s.kurtosis = p2 > 0 ? (p4 / count) / ((p2 / count) * (p2 / count)) : 0;
    s.circularity = p2 > 0 ? 1.0 - std::abs(sum_sq / count) / (p2 / count) : 0;
    return s;
}

InterferenceSamples interference_samples(int n_tau, int n_cp, int n, int order, std::uint64_t seed, int trials) {
    if (n_tau <= n_cp) throw InvalidParams("interference_samples: requires n_tau > n_cp");
    if (n_tau > n + n_cp) throw InvalidParams("interference_samples: delay longer than one symbol");
    if (trials < 1) throw InvalidParams("interference_samples: trials must be >= 1");
    const int excess = n_tau - n_cp;
    const auto points = constellation(order);

    // c[j] = sum_{n < excess} e^{j2pi jn/N}; shared by both terms.
    std::vector<cplx> kernel(n);
    kernel[0] = static_cast<double>(excess);
    for (int j = 1; j < n; ++j) {
        const cplx w = std::polar(1.0, 2 * kPi * j / n);
        const cplx wd = std::polar(1.0, 2 * kPi * static_cast<double>(j) * excess / n);
        kernel[j] = (1.0 - wd) / (1.0 - w);
    }

    InterferenceSamples out;
    out.split = interference_split(n_tau, n_cp, n);
    out.ici.reserve(static_cast<std::size_t>(n) * trials);
    out.isi.reserve(static_cast<std::size_t>(n) * trials);
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    std::vector<cplx> cur(n), prev(n), a(n), b(n);
    for (int t = 0; t < trials; ++t) {
        auto eng = make_engine(seed, Stream::Interference, static_cast<std::uint64_t>(t));
        for (int k = 0; k < n; ++k) cur[k] = points[pick(eng)];
        for (int k = 0; k < n; ++k) prev[k] = points[pick(eng)];
        for (int k = 0; k < n; ++k) {
            const double kd = static_cast<double>(k);
            a[k] = cur[k] * std::polar(1.0, -2 * kPi * std::fmod(kd * n_tau, n) / n);
            b[k] = prev[k] * std::polar(1.0, 2 * kPi * std::fmod(kd * (n_cp - n_tau) + kd * n, n) / n);
        }
        for (int i = 0; i < n; ++i) {
            cplx ic{}, is{};
            for (int k = 0; k < n; ++k) {
                const cplx c = kernel[(k - i + n) % n];
                is += b[k] * c;
                if (k != i) ic += a[k] * c;
            }
            out.ici.push_back(-ic / cur[i] / static_cast<double>(n));
            out.isi.push_back(is / cur[i] / static_cast<double>(n));
        }
    }
    out.ici_stats = sample_stats(out.ici);
    out.isi_stats = sample_stats(out.isi);
    return out;
}

}  // namespace ofdmisac
