#include <gtest/gtest.h>

#include <random>

#include "ofdmisac/analysis.hpp"
#include "ofdmisac/receiver.hpp"

using namespace ofdmisac;

namespace {

const SystemParams kParams;
const DerivedParams kDp = derive(kParams);

SystemParams one_watt() {
    SystemParams p;
    p.tx_power_w = 1.0;
    return p;
}

}  // namespace

TEST(InterferenceSplit, ReferenceConfiguration) {
    const auto s = interference_split(174, 145, 2048);
    EXPECT_NEAR(s.p_useful, 0.971880, 5e-7);
    EXPECT_NEAR(s.p_ici, 0.013960, 5e-7);
    EXPECT_NEAR(s.p_isi, 0.014160, 5e-7);
    EXPECT_DOUBLE_EQ(s.excess_taps, 29);
}

TEST(InterferenceSplit, InsideCpIsClean) {
    for (int tau : {0, 1, 100, 145}) {
        const auto s = interference_split(tau, 145, 2048);
        EXPECT_EQ(s.p_useful, 1.0);
        EXPECT_EQ(s.p_ici, 0.0);
        EXPECT_EQ(s.p_isi, 0.0);
    }
}

TEST(InterferenceSplit, ComponentsSumToOne) {
    std::mt19937_64 eng(3);
    for (int i = 0; i < 1000; ++i) {
        const int n = std::uniform_int_distribution<int>(2, 16384)(eng);
        const int ncp = std::uniform_int_distribution<int>(0, n - 1)(eng);
        const int tau = std::uniform_int_distribution<int>(ncp + 1, ncp + n)(eng);
        const auto s = interference_split(tau, ncp, n);
        EXPECT_NEAR(s.p_useful + s.p_ici + s.p_isi, 1.0, 1e-15);
        EXPECT_GE(s.p_useful, 0.0);
        EXPECT_LE(s.p_isi, 1.0);
    }
    EXPECT_THROW(interference_split(10, 2048, 2048), InvalidParams);
}

TEST(Sinr, SnrFreeAtNearTarget) {
    // P_R(30.5 m) = -64.975 dBm, N_0 df = -120.283 dBm.
    const double n0df = kDp.noise_psd_w_per_hz * 120e3;
    EXPECT_NEAR(watts_to_dbm(n0df), -120.283, 0.001);
    EXPECT_NEAR(linear_to_db(snr_free(30.5, 3.5, kParams, kDp)), 55.31, 0.01);
    // Cross-check: RD peak minus floor minus 10 log10 M.
    EXPECT_NEAR(-20.40 - (-87.17) - linear_to_db(14), 55.31, 0.02);
}

TEST(Sinr, SnrFreeScaling) {
    SystemParams wide = kParams;
    wide.subcarrier_spacing_hz = 240e3;
    const DerivedParams dpw = derive(wide);
    EXPECT_NEAR(snr_free(100, 1, wide, dpw) / snr_free(100, 1, kParams, kDp), 0.5, 1e-12);
    EXPECT_NEAR(linear_to_db(snr_free(50, 1, kParams, kDp) / snr_free(500, 1, kParams, kDp)), 40.0, 1e-9);
}

TEST(Sinr, InsideCpEqualsCoherentGain) {
    for (double d : {1.0, 30.5, 80.0, 88.4}) {
        const auto r = sinr_single(d, 3.5, kParams, kDp);
        EXPECT_DOUBLE_EQ(r.sinr, 14 * r.snr_free);
        EXPECT_NEAR(r.degradation_db, 0.0, 1e-12);
        EXPECT_EQ(r.interference_term, 0.0);
    }
}

TEST(Sinr, ExampleOneGapAtOneKilometre) {
    const auto short_cp = sinr_single(1000, 3.5, kParams, kDp);
    SystemParams long_cp = kParams;
    long_cp.cp_taps = 1640;
    const auto full = sinr_single(1000, 3.5, long_cp, derive(long_cp));
    const double gap = linear_to_db(full.sinr / short_cp.sinr);
    EXPECT_GE(gap, 11.0);
    EXPECT_LE(gap, 13.0);
    EXPECT_NEAR(gap, 11.37, 0.05);
}

TEST(Sinr, BoundedByUpperBoundAndMonotone) {
    double prev = INFINITY;
    for (int i = 0; i < 200; ++i) {
        const double d = 1.0 + i * (1248.0 / 199);
        const auto r = sinr_single(d, 3.5, kParams, kDp);
        EXPECT_LE(r.sinr, sinr_upper(d, 3.5, kParams, kDp) * (1 + 1e-12));
        EXPECT_LE(r.sinr, 14 * r.snr_free * (1 + 1e-12));
        EXPECT_LT(r.sinr, prev);
        prev = r.sinr;
    }
}

TEST(Sinr, UpperBoundIndependentOfBandwidthAtFixedTiming) {
    SystemParams wide = kParams;
    wide.num_subcarriers = 4096;
    wide.subcarrier_spacing_hz = 120e3;
    wide.cp_taps = 290;  // same T_cp
    // Doubling N at fixed df doubles B; gamma_1 = P_R / (N_0 df) is unchanged too.
    EXPECT_NEAR(sinr_upper(700, 3.5, wide, derive(wide)) / sinr_upper(700, 3.5, kParams, kDp), 1.0, 1e-12);
}

TEST(Sinr, ApproachesUpperBoundAsNGrows) {
    double prev_gap = INFINITY;
    for (int n : {512, 2048, 8192}) {
        SystemParams p = kParams;
        p.num_subcarriers = n;
        p.cp_taps = 36 * n / 512;
        const DerivedParams dp = derive(p);
        const double d = 700;
        const double gap = sinr_upper(d, 3.5, p, dp) / sinr_single(d, 3.5, p, dp).sinr;
        EXPECT_GT(gap, 1.0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
}

TEST(Interference, SingleBeyondCpTarget) {
    const Scene s = scene_from_targets({{304.96, 0, 3.5}}, kParams, kDp, 1);
    const double it = total_interference(s, kDp);
    EXPECT_NEAR(it / s.paths[0].received_power_w, 0.3166, 5e-4);
    EXPECT_NEAR(watts_to_dbm(it), -109.96, 0.01);
    const Scene inside = scene_from_targets({{30.5, 0, 3.5}, {80, 0, 1}}, kParams, kDp, 1);
    EXPECT_EQ(total_interference(inside, kDp), 0.0);
}

TEST(Sinr, MultiTargetReductions) {
    const Scene lone = scene_from_targets({{400, 0, 3.5}}, kParams, kDp, 1);
    EXPECT_NEAR(sinr_multi(400, 3.5, lone, kParams, kDp).sinr / sinr_single(400, 3.5, kParams, kDp).sinr, 1.0,
                1e-9);
    const Scene inside = scene_from_targets({{30.5, 0, 3.5}, {60, 0, 3.5}}, kParams, kDp, 1);
    EXPECT_DOUBLE_EQ(sinr_multi(30.5, 3.5, inside, kParams, kDp).sinr, 14 * snr_free(30.5, 3.5, kParams, kDp));

    double prev = 0;
    for (double rcs : {1.0, 1e-2, 1e-4, 1e-8}) {
        const Scene s = scene_from_targets({{400, 0, 3.5}, {200, 0, rcs}, {300, 0, rcs}}, kParams, kDp, 1);
        const double ratio = sinr_multi(400, 3.5, s, kParams, kDp).sinr / sinr_single(400, 3.5, kParams, kDp).sinr;
        EXPECT_LE(ratio, 1.0);
        EXPECT_GT(ratio, prev);
        prev = ratio;
    }
    EXPECT_NEAR(prev, 1.0, 1e-6);
    EXPECT_THROW(sinr_multi(500, 3.5, lone, kParams, kDp), InvalidParams);
}

TEST(Sinr, SlidingRemovesUsefulLoss) {
    for (double d : {50.0, 300.0, 800.0, 1200.0}) {
        const Scene s = scene_from_targets({{d, 0, 3.5}}, kParams, kDp, 1);
        const auto sw = sinr_sliding(d, 3.5, s, kParams, kDp);
        EXPECT_GE(sw.sinr, sinr_single(d, 3.5, kParams, kDp).sinr);
    }
    const Scene near = scene_from_targets({{30.5, 0, 3.5}}, kParams, kDp, 1);
    EXPECT_DOUBLE_EQ(sinr_sliding(30.5, 3.5, near, kParams, kDp).sinr, 14 * snr_free(30.5, 3.5, kParams, kDp));

    const SystemParams loud = one_watt();
    const DerivedParams dp = derive(loud);
    for (double d = 10; d <= dp.unambiguous_range_m; d += 10) {
        const Scene s = scene_from_targets({{d, 0, 3.5}}, loud, dp, 1);
        ASSERT_GT(sinr_sliding(d, 3.5, s, loud, dp).sinr, 10.0) << d;
    }
}

TEST(MaxRange, ReferenceOperatingPoints) {
    EXPECT_NEAR(max_range(10, RangeModel::Conventional, 3.5, kParams, kDp), 610, 2);
    const SystemParams long_cp = with_quantized_cp(kParams, 5.3e-6);
    EXPECT_NEAR(max_range(10, RangeModel::Conventional, 3.5, long_cp, derive(long_cp)), 800, 5);
    SystemParams no_cp = kParams;
    no_cp.cp_taps = 0;
    EXPECT_NEAR(max_range(10, RangeModel::Conventional, 3.5, no_cp, derive(no_cp)), 590, 10);
    const SystemParams loud = one_watt();
    const DerivedParams dp = derive(loud);
    EXPECT_NEAR(max_range(10, RangeModel::Conventional, 3.5, loud, dp), 870, 5);
    EXPECT_DOUBLE_EQ(max_range(10, RangeModel::Sliding, 3.5, loud, dp), dp.unambiguous_range_m);
}

TEST(MaxRange, SolutionSitsOnThreshold) {
    const double d = max_range(10, RangeModel::Conventional, 3.5, kParams, kDp);
    EXPECT_NEAR(sinr_single(d, 3.5, kParams, kDp).sinr, 10.0, 1e-4);
    EXPECT_THROW(max_range(1e15, RangeModel::Conventional, 3.5, kParams, kDp), NoRange);
    EXPECT_THROW(max_range(0, RangeModel::Conventional, 3.5, kParams, kDp), InvalidParams);
}

TEST(InterferenceSamples, VariancesMatchSplit) {
    for (int order : {2, 4}) {
        const auto s = interference_samples(174, 145, 2048, order, 11, 40);
        EXPECT_EQ(s.ici.size(), 2048u * 40);
        EXPECT_NEAR(s.ici_stats.variance / s.split.p_ici, 1.0, 0.10) << order;
        EXPECT_NEAR(s.isi_stats.variance / s.split.p_isi, 1.0, 0.10) << order;
        EXPECT_NEAR(s.ici_stats.kurtosis, 2.0, 0.2);
        EXPECT_NEAR(s.isi_stats.kurtosis, 2.0, 0.2);
        EXPECT_GT(s.ici_stats.circularity, 0.9);
    }
}

TEST(InterferenceSamples, ZeroMean) {
    // Bins within one symbol are correlated; test the mean over independent symbol pairs.
    const auto s = interference_samples(300, 145, 2048, 4, 5, 200);
    std::vector<cplx> per_trial;
    for (int t = 0; t < 200; ++t) per_trial.push_back(s.ici[static_cast<std::size_t>(t) * 2048 + 17]);
    const auto st = sample_stats(per_trial);
    EXPECT_LT(std::abs(st.mean), 3 * std::sqrt(st.variance / 200));
}

TEST(InterferenceSamples, MatchesSimulatedDataRemoval) {
    // Residual after removing the useful term from a noiseless beyond-CP echo has
    // per-subcarrier power P_ICI + P_ISI (unit-power normalization).
    SystemParams p = kParams;
    p.modulation_order = 4;
    const DerivedParams dp = derive(p);
    const auto grid = gen_data_grid(dp, 4, 2);
    Scene scene;
    Path path;
    path.gain = 1.0;
    path.delay_taps = 174;
    scene.paths.push_back(path);
    const auto rx = apply_channel(reference_frame(grid, dp), scene, dp);
    const auto f = remove_data(demodulate(extract_symbols(rx, dp, 0)), grid, RemovalMode::Divide);
    const auto split = interference_split(174, 145, 2048);
    double resid = 0;
    int count = 0;
    for (int m = 1; m < 14; ++m) {
        for (int i = 0; i < 2048; ++i) {
            const cplx useful = (2048.0 - 29.0) * std::polar(1.0, -2 * kPi * i * 174.0 / 2048);
            resid += std::norm((f(i, m) - useful) / 2048.0);
            ++count;
        }
    }
    EXPECT_NEAR(resid / count / (split.p_ici + split.p_isi), 1.0, 0.1);
    EXPECT_THROW(interference_samples(100, 145, 2048, 4, 1, 1), InvalidParams);
}
